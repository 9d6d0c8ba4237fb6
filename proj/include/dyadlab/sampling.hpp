#pragma once

// Seeded, platform-independent draws of dyadic points.

#include <cstdint>
#include <random>

#include "dyadlab/dyadic.hpp"
#include "dyadlab/interval.hpp"

namespace dyadlab {

using Rng = std::mt19937_64;

/// Uniform integer in [0, 2^bits), assembled from 64-bit words.
inline BigInt random_bits(Rng& rng, std::int64_t bits)
{
    BigInt out = 0;
    std::int64_t left = bits;
    while (left > 0) {
        std::uint64_t word = rng();
        std::int64_t take = left < 64 ? left : 64;
        if (take < 64)
            word &= (std::uint64_t{1} << take) - 1;
        out = detail::shl(out, take);
        BigInt w;
        mpz_import(w.get_mpz_t(), 1, 1, sizeof(word), 0, 0, &word);
        out += w;
        left -= take;
    }
    return out;
}

/// Uniform integer in [0, n], by rejection.
inline BigInt random_below_or_equal(Rng& rng, const BigInt& n)
{
    if (sgn(n) < 0)
        throw InvalidArgument("random bound must be non-negative");
    std::int64_t bits = detail::bit_length(n);
    while (true) {
        BigInt r = random_bits(rng, bits);
        if (r <= n)
            return r;
    }
}

/// lo + width * r / 2^bits with r uniform in [0, 2^bits], redrawn until the
/// point lies in `iv` (matters only for open endpoints).
inline Dyadic sample_dyadic(Rng& rng, const DyInterval& iv, std::int64_t bits = 24)
{
    if (iv.measure().is_zero())
        return iv.lo();
    BigInt top = pow2_int(bits);
    while (true) {
        BigInt r = random_below_or_equal(rng, top);
        Dyadic x = iv.lo() + (iv.measure() * Dyadic(r)).scaled(-bits);
        if (iv.contains(x))
            return x;
    }
}

} // namespace dyadlab
