#pragma once

// Exact dyadic rationals m * 2^e with a GMP mantissa.

#include <algorithm>
#include <atomic>
#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>

#include <gmpxx.h>

#include "dyadlab/errors.hpp"

namespace dyadlab {

using BigInt = mpz_class;

namespace detail {

inline std::atomic<std::int64_t>& span_guard_storage()
{
    static std::atomic<std::int64_t> bits{std::int64_t{1} << 20};
    return bits;
}

inline std::int64_t checked_add(std::int64_t a, std::int64_t b)
{
    std::int64_t out;
    if (__builtin_add_overflow(a, b, &out))
        throw GuardExceeded("dyadic exponent overflow");
    return out;
}

inline std::int64_t checked_sub(std::int64_t a, std::int64_t b)
{
    std::int64_t out;
    if (__builtin_sub_overflow(a, b, &out))
        throw GuardExceeded("dyadic exponent overflow");
    return out;
}

inline std::int64_t bit_length(const BigInt& m)
{
    if (sgn(m) == 0)
        return 0;
    return static_cast<std::int64_t>(mpz_sizeinbase(m.get_mpz_t(), 2));
}

inline BigInt shl(const BigInt& m, std::int64_t bits)
{
    BigInt out;
    mpz_mul_2exp(out.get_mpz_t(), m.get_mpz_t(), static_cast<mp_bitcnt_t>(bits));
    return out;
}

} // namespace detail

/// Maximum mantissa width (in bits) that exponent alignment may produce.
/// Alignment between numbers whose exponents are further apart than this
/// raises GuardExceeded instead of allocating.
inline std::int64_t exponent_span_guard()
{
    return detail::span_guard_storage().load(std::memory_order_relaxed);
}

inline void set_exponent_span_guard(std::int64_t bits)
{
    if (bits < 64)
        throw InvalidArgument("exponent span guard must be at least 64 bits");
    detail::span_guard_storage().store(bits, std::memory_order_relaxed);
}

/// Restores the previous guard on scope exit.
class ScopedSpanGuard {
public:
    explicit ScopedSpanGuard(std::int64_t bits) : saved_(exponent_span_guard())
    {
        set_exponent_span_guard(bits);
    }
    ~ScopedSpanGuard() { detail::span_guard_storage().store(saved_); }
    ScopedSpanGuard(const ScopedSpanGuard&) = delete;
    ScopedSpanGuard& operator=(const ScopedSpanGuard&) = delete;

private:
    std::int64_t saved_;
};

/// Smallest e with 2^e >= n, for n >= 1.
inline std::int64_t ceil_log2(const BigInt& n)
{
    if (sgn(n) <= 0)
        throw InvalidArgument("ceil_log2 of a non-positive integer");
    std::int64_t bits = detail::bit_length(n);
    // exact power of two iff the lowest set bit is the top bit
    if (static_cast<std::int64_t>(mpz_scan1(n.get_mpz_t(), 0)) == bits - 1)
        return bits - 1;
    return bits;
}

inline BigInt pow2_int(std::int64_t e)
{
    if (e < 0)
        throw InvalidArgument("pow2_int with negative exponent");
    return detail::shl(BigInt(1), e);
}

/// m * 2^e in canonical form: m odd, or m == 0 and e == 0.
class Dyadic {
public:
    Dyadic() = default;
    Dyadic(int v) : Dyadic(BigInt(v), 0) {}
    Dyadic(long v) : Dyadic(BigInt(v), 0) {}
    Dyadic(long long v) : Dyadic(BigInt(static_cast<long>(v)), 0) {}
    explicit Dyadic(const BigInt& v) : Dyadic(v, 0) {}

    Dyadic(BigInt mantissa, std::int64_t exponent)
        : mantissa_(std::move(mantissa)), exponent_(exponent)
    {
        normalize();
    }

    static Dyadic pow2(std::int64_t e) { return Dyadic(BigInt(1), e); }

    const BigInt& mantissa() const { return mantissa_; }
    std::int64_t exponent() const { return exponent_; }

    int sign() const { return sgn(mantissa_); }
    bool is_zero() const { return sign() == 0; }
    bool is_integer() const { return exponent_ >= 0; }

    /// Value as an integer; NotExact if there is a fractional part.
    BigInt to_integer() const
    {
        if (!is_integer())
            throw NotExact("dyadic " + str() + " is not an integer");
        return detail::shl(mantissa_, exponent_);
    }

    BigInt floor() const
    {
        if (is_integer())
            return detail::shl(mantissa_, exponent_);
        BigInt out;
        mpz_fdiv_q_2exp(out.get_mpz_t(), mantissa_.get_mpz_t(),
                        static_cast<mp_bitcnt_t>(-exponent_));
        return out;
    }

    BigInt ceil() const
    {
        if (is_integer())
            return detail::shl(mantissa_, exponent_);
        BigInt out;
        mpz_cdiv_q_2exp(out.get_mpz_t(), mantissa_.get_mpz_t(),
                        static_cast<mp_bitcnt_t>(-exponent_));
        return out;
    }

    /// this * 2^k, exact.
    Dyadic scaled(std::int64_t k) const
    {
        if (is_zero())
            return {};
        return Dyadic(mantissa_, detail::checked_add(exponent_, k));
    }

    bool is_power_of_two() const { return mantissa_ == 1; }

    /// Position of the most significant bit: |x| in [2^p, 2^(p+1)).
    std::int64_t top_bit() const
    {
        return detail::checked_add(exponent_, detail::bit_length(mantissa_) - 1);
    }

    Dyadic operator-() const { return Dyadic(BigInt(-mantissa_), exponent_); }

    friend Dyadic operator+(const Dyadic& a, const Dyadic& b)
    {
        if (a.is_zero())
            return b;
        if (b.is_zero())
            return a;
        auto [ma, mb, e] = align(a, b);
        return Dyadic(BigInt(ma + mb), e);
    }

    friend Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }

    friend Dyadic operator*(const Dyadic& a, const Dyadic& b)
    {
        if (a.is_zero() || b.is_zero())
            return {};
        return Dyadic(BigInt(a.mantissa_ * b.mantissa_),
                      detail::checked_add(a.exponent_, b.exponent_));
    }

    Dyadic& operator+=(const Dyadic& o) { return *this = *this + o; }
    Dyadic& operator-=(const Dyadic& o) { return *this = *this - o; }
    Dyadic& operator*=(const Dyadic& o) { return *this = *this * o; }

    friend bool operator==(const Dyadic& a, const Dyadic& b)
    {
        return a.exponent_ == b.exponent_ && a.mantissa_ == b.mantissa_;
    }

    friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b)
    {
        int sa = a.sign();
        int sb = b.sign();
        if (sa != sb)
            return sa <=> sb;
        if (sa == 0)
            return std::strong_ordering::equal;
        std::int64_t ta = a.top_bit();
        std::int64_t tb = b.top_bit();
        if (ta != tb)
            return sa > 0 ? ta <=> tb : tb <=> ta;
        // same magnitude band: the exponent gap is bounded by the mantissa width
        std::int64_t e = std::min(a.exponent_, b.exponent_);
        BigInt ma = detail::shl(a.mantissa_, a.exponent_ - e);
        BigInt mb = detail::shl(b.mantissa_, b.exponent_ - e);
        int c = cmp(ma, mb);
        return c <=> 0;
    }

    /// Canonical text form `m*2^e`.
    std::string str() const
    {
        return mantissa_.get_str() + "*2^" + std::to_string(exponent_);
    }

    /// Exact decimal rendering, offered only when exponent >= -64.
    std::optional<std::string> decimal() const
    {
        if (exponent_ < -64)
            return std::nullopt;
        if (exponent_ >= 0)
            return to_integer().get_str();
        auto frac_digits = static_cast<std::size_t>(-exponent_);
        BigInt five;
        mpz_ui_pow_ui(five.get_mpz_t(), 5, static_cast<unsigned long>(frac_digits));
        BigInt scaled = abs(mantissa_) * five;
        std::string digits = scaled.get_str();
        if (digits.size() <= frac_digits)
            digits.insert(0, frac_digits + 1 - digits.size(), '0');
        digits.insert(digits.size() - frac_digits, ".");
        return (sign() < 0 ? "-" : "") + digits;
    }

    static Dyadic parse(std::string_view text);

private:
    static std::tuple<BigInt, BigInt, std::int64_t> align(const Dyadic& a, const Dyadic& b)
    {
        std::int64_t e = std::min(a.exponent_, b.exponent_);
        std::int64_t sa = detail::checked_sub(a.exponent_, e);
        std::int64_t sb = detail::checked_sub(b.exponent_, e);
        std::int64_t width = std::max(sa + detail::bit_length(a.mantissa_),
                                      sb + detail::bit_length(b.mantissa_));
        if (width > exponent_span_guard())
            throw GuardExceeded("aligning " + a.str() + " and " + b.str() + " needs " +
                                std::to_string(width) + " mantissa bits");
        return {detail::shl(a.mantissa_, sa), detail::shl(b.mantissa_, sb), e};
    }

    void normalize()
    {
        if (sgn(mantissa_) == 0) {
            exponent_ = 0;
            return;
        }
        auto tz = static_cast<std::int64_t>(mpz_scan1(mantissa_.get_mpz_t(), 0));
        if (tz > 0) {
            mpz_tdiv_q_2exp(mantissa_.get_mpz_t(), mantissa_.get_mpz_t(),
                            static_cast<mp_bitcnt_t>(tz));
            exponent_ = detail::checked_add(exponent_, tz);
        }
    }

    friend struct AlignAccess;

    BigInt mantissa_{0};
    std::int64_t exponent_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, const Dyadic& d) { return os << d.str(); }

inline Dyadic abs(const Dyadic& d) { return d.sign() < 0 ? -d : d; }
inline const Dyadic& min(const Dyadic& a, const Dyadic& b) { return b < a ? b : a; }
inline const Dyadic& max(const Dyadic& a, const Dyadic& b) { return a < b ? b : a; }

/// Integer mantissas of a and b over the common exponent min(ea, eb),
/// subject to the span guard.
struct AlignAccess {
    static std::tuple<BigInt, BigInt, std::int64_t> align(const Dyadic& a, const Dyadic& b)
    {
        return Dyadic::align(a, b);
    }
};

/// q with q * b == a. NotExact when a / b is not dyadic.
inline Dyadic div_exact(const Dyadic& a, const Dyadic& b)
{
    if (b.is_zero())
        throw InvalidArgument("division by zero");
    if (a.is_zero())
        return {};
    // b's mantissa is odd, so a / b is dyadic iff it divides a's mantissa
    if (!mpz_divisible_p(a.mantissa().get_mpz_t(), b.mantissa().get_mpz_t()))
        throw NotExact(a.str() + " / " + b.str() + " is not dyadic");
    BigInt q;
    mpz_divexact(q.get_mpz_t(), a.mantissa().get_mpz_t(), b.mantissa().get_mpz_t());
    return Dyadic(std::move(q), detail::checked_sub(a.exponent(), b.exponent()));
}

/// a = q * b + r with 0 <= r < b, for b > 0.
inline std::pair<BigInt, Dyadic> floor_ratio(const Dyadic& a, const Dyadic& b)
{
    if (b.sign() <= 0)
        throw InvalidArgument("floor_ratio needs a positive divisor");
    if (a.is_zero())
        return {BigInt(0), Dyadic{}};
    auto [ma, mb, e] = AlignAccess::align(a, b);
    BigInt q;
    BigInt r;
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), ma.get_mpz_t(), mb.get_mpz_t());
    return {q, Dyadic(std::move(r), e)};
}

inline BigInt floor_div(const Dyadic& a, const Dyadic& b) { return floor_ratio(a, b).first; }

inline BigInt ceil_div(const Dyadic& a, const Dyadic& b)
{
    auto [q, r] = floor_ratio(a, b);
    if (!r.is_zero())
        q += 1;
    return q;
}

namespace detail {

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t'))
        s.remove_suffix(1);
    return s;
}

inline BigInt parse_integer(std::string_view s)
{
    s = trim(s);
    std::string buf(s);
    if (!buf.empty() && buf.front() == '+')
        buf.erase(0, 1);
    bool ok = !buf.empty();
    for (std::size_t i = 0; i < buf.size() && ok; ++i)
        ok = (buf[i] >= '0' && buf[i] <= '9') || (i == 0 && buf[i] == '-' && buf.size() > 1);
    if (!ok)
        throw ParseError("not an integer: '" + std::string(s) + "'");
    return BigInt(buf, 10);
}

inline std::int64_t parse_i64(std::string_view s)
{
    BigInt v = parse_integer(s);
    if (!v.fits_slong_p())
        throw ParseError("exponent out of range: '" + std::string(s) + "'");
    return v.get_si();
}

} // namespace detail

/// Accepts `m*2^e`, plain integers, `p/q` with q a power of two, and finite
/// decimals that happen to be dyadic ("15.5859375").
inline Dyadic Dyadic::parse(std::string_view text)
{
    std::string_view s = detail::trim(text);
    if (s.empty())
        throw ParseError("empty dyadic literal");

    if (auto star = s.find("*2^"); star != std::string_view::npos)
        return Dyadic(detail::parse_integer(s.substr(0, star)),
                      detail::parse_i64(s.substr(star + 3)));

    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        BigInt num = detail::parse_integer(s.substr(0, slash));
        BigInt den = detail::parse_integer(s.substr(slash + 1));
        if (sgn(den) <= 0)
            throw ParseError("non-positive denominator in '" + std::string(s) + "'");
        std::int64_t k = ceil_log2(den);
        if (pow2_int(k) != den)
            throw NotExact("'" + std::string(s) + "' is not dyadic");
        return Dyadic(num, -k);
    }

    if (auto dot = s.find('.'); dot != std::string_view::npos) {
        std::string whole(s.substr(0, dot));
        std::string frac(s.substr(dot + 1));
        bool negative = !whole.empty() && whole.front() == '-';
        if (negative || (!whole.empty() && whole.front() == '+'))
            whole.erase(0, 1);
        if (whole.empty())
            whole = "0";
        for (char c : frac)
            if (c < '0' || c > '9')
                throw ParseError("bad decimal literal '" + std::string(s) + "'");
        BigInt digits = detail::parse_integer(whole + frac);
        auto f = static_cast<unsigned long>(frac.size());
        BigInt five;
        mpz_ui_pow_ui(five.get_mpz_t(), 5, f);
        if (!mpz_divisible_p(digits.get_mpz_t(), five.get_mpz_t()))
            throw NotExact("'" + std::string(s) + "' is not dyadic");
        BigInt m;
        mpz_divexact(m.get_mpz_t(), digits.get_mpz_t(), five.get_mpz_t());
        if (negative)
            m = -m;
        return Dyadic(std::move(m), -static_cast<std::int64_t>(f));
    }

    return Dyadic(detail::parse_integer(s), 0);
}

} // namespace dyadlab
