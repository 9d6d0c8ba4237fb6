#pragma once

// Exact counting and summation over finite arithmetic progressions
// start + k * step, k in [0, count).

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dyadlab/dyadic.hpp"
#include "dyadlab/interval.hpp"
#include "dyadlab/piecewise_linear.hpp"

namespace dyadlab::lattice {

/// sum_{i=0}^{n-1} floor((a*i + b) / m) for n >= 0, m >= 1 and any signs of
/// a, b. Euclidean-style reduction: O(log) big-integer steps.
inline BigInt floor_sum(BigInt n, BigInt m, BigInt a, BigInt b)
{
    if (sgn(n) < 0 || sgn(m) <= 0)
        throw InvalidArgument("floor_sum needs n >= 0 and m >= 1");
    BigInt ans = 0;
    BigInt tri = n * (n - 1) / 2;
    if (sgn(a) < 0) {
        BigInt a2;
        mpz_fdiv_r(a2.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
        ans -= tri * ((a2 - a) / m);
        a = a2;
    }
    if (sgn(b) < 0) {
        BigInt b2;
        mpz_fdiv_r(b2.get_mpz_t(), b.get_mpz_t(), m.get_mpz_t());
        ans -= n * ((b2 - b) / m);
        b = b2;
    }
    while (true) {
        if (a >= m) {
            ans += n * (n - 1) / 2 * (a / m);
            a %= m;
        }
        if (b >= m) {
            ans += n * (b / m);
            b %= m;
        }
        BigInt y_max = a * n + b;
        if (y_max < m)
            break;
        n = y_max / m;
        b = y_max % m;
        std::swap(m, a);
    }
    return ans;
}

/// {[base + i*period, base + i*period + width] : 0 <= i < count}; the
/// endpoint flags apply to every component.
struct PeriodicIntervalSet {
    Dyadic base;
    Dyadic period;
    Dyadic width;
    BigInt count{1};
    bool lo_closed = true;
    bool hi_closed = true;

    void validate() const
    {
        if (period.sign() <= 0)
            throw InvalidArgument("periodic set needs a positive period");
        if (width.sign() < 0 || !(width < period))
            throw InvalidArgument("periodic set needs 0 <= width < period");
        if (sgn(count) < 1)
            throw InvalidArgument("periodic set needs count >= 1");
        if (width.is_zero() && !(lo_closed && hi_closed))
            throw InvalidArgument("zero-width components must be closed");
    }

    DyInterval component(const BigInt& i) const
    {
        Dyadic lo = base + Dyadic(i) * period;
        return {lo, lo + width, lo_closed, hi_closed};
    }

    /// Closed hull [base, base + (count-1)*period + width].
    DyInterval hull() const
    {
        return DyInterval::closed(base, base + Dyadic(BigInt(count - 1)) * period + width);
    }

    Dyadic measure() const { return Dyadic(count) * width; }
};

/// Finite arithmetic progression start + k*step, 0 <= k < count.
struct Progression {
    Dyadic start;
    Dyadic step{1};
    BigInt count{1};
    std::string tag;

    Dyadic at(const BigInt& k) const { return start + Dyadic(k) * step; }
    Dyadic last() const { return at(count - 1); }
};

/// Inclusive index range {k in [0, count) : start + k*step in iv}, or nullopt.
inline std::optional<std::pair<BigInt, BigInt>>
ap_index_range(const Dyadic& start, const Dyadic& step, const BigInt& count, const DyInterval& iv)
{
    if (step.sign() <= 0)
        throw InvalidArgument("progression step must be positive");
    if (sgn(count) <= 0)
        return std::nullopt;
    auto [ql, rl] = floor_ratio(iv.lo() - start, step);
    BigInt k_lo = (iv.lo_closed() && rl.is_zero()) ? ql : BigInt(ql + 1);
    auto [qh, rh] = floor_ratio(iv.hi() - start, step);
    BigInt k_hi = (!iv.hi_closed() && rh.is_zero()) ? BigInt(qh - 1) : qh;
    if (sgn(k_lo) < 0)
        k_lo = 0;
    if (k_hi > count - 1)
        k_hi = count - 1;
    if (k_lo > k_hi)
        return std::nullopt;
    return std::make_pair(k_lo, k_hi);
}

inline BigInt count_ap_in_interval(const Dyadic& start, const Dyadic& step, const BigInt& count,
                                   const DyInterval& iv)
{
    auto r = ap_index_range(start, step, count, iv);
    return r ? BigInt(r->second - r->first + 1) : BigInt(0);
}

namespace detail {

/// Integer numerators of `values` over the smallest common power of two.
inline std::vector<BigInt> common_integers(const std::vector<const Dyadic*>& values)
{
    std::int64_t e = 0;
    bool any = false;
    for (const Dyadic* v : values) {
        if (v->is_zero())
            continue;
        e = any ? std::min(e, v->exponent()) : v->exponent();
        any = true;
    }
    std::vector<BigInt> out;
    out.reserve(values.size());
    for (const Dyadic* v : values) {
        if (v->is_zero()) {
            out.emplace_back(0);
            continue;
        }
        std::int64_t shift = v->exponent() - e;
        if (shift + dyadlab::detail::bit_length(v->mantissa()) > exponent_span_guard())
            throw GuardExceeded("common scaling of " + v->str() + " exceeds the span guard");
        out.push_back(dyadlab::detail::shl(v->mantissa(), shift));
    }
    return out;
}

} // namespace detail

/// #{k in [0, count) : start + k*step in ps}, without iterating periods.
inline BigInt count_ap_in_periodic(const Dyadic& start, const Dyadic& step, const BigInt& count,
                                   const PeriodicIntervalSet& ps)
{
    ps.validate();
    if (step.sign() <= 0)
        throw InvalidArgument("progression step must be positive");
    if (sgn(count) <= 0)
        return 0;

    Dyadic offset = start - ps.base;
    auto ints = detail::common_integers({&offset, &step, &ps.period, &ps.width});
    const BigInt& y0 = ints[0];
    const BigInt& s = ints[1];
    const BigInt& period = ints[2];
    const BigInt& width = ints[3];

    // residue window [lo, hi] inside one period, in scaled units
    BigInt lo = ps.lo_closed ? BigInt(0) : BigInt(1);
    BigInt hi = ps.hi_closed ? width : BigInt(width - 1);
    if (hi < lo)
        return 0;
    BigInt y_max = (ps.count - 1) * period + hi;

    BigInt k_lo;
    mpz_cdiv_q(k_lo.get_mpz_t(), BigInt(lo - y0).get_mpz_t(), s.get_mpz_t());
    if (sgn(k_lo) < 0)
        k_lo = 0;
    BigInt k_hi;
    mpz_fdiv_q(k_hi.get_mpz_t(), BigInt(y_max - y0).get_mpz_t(), s.get_mpz_t());
    if (k_hi > count - 1)
        k_hi = count - 1;
    if (k_lo > k_hi)
        return 0;

    BigInt n = k_hi - k_lo + 1;
    BigInt b = y0 + k_lo * s;
    // [y mod P in [lo, hi]] = floor((y - lo)/P) - floor((y - hi - 1)/P)
    return floor_sum(n, period, s, b - lo) - floor_sum(n, period, s, b - hi - 1);
}

/// sum_{k=0}^{count-1} f(start + k*step), exact. Each linear piece is summed
/// in closed form as an arithmetic series.
inline Dyadic sum_pl_over_ap(const PiecewiseLinear& f, const Dyadic& start, const Dyadic& step,
                             const BigInt& count)
{
    if (step.sign() <= 0)
        throw InvalidArgument("progression step must be positive");
    const auto& pts = f.breakpoints();
    Dyadic total;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const Breakpoint& a = pts[i];
        const Breakpoint& b = pts[i + 1];
        if (a.value.is_zero() && b.value.is_zero())
            continue;
        auto range = ap_index_range(start, step, count, DyInterval::closed_open(a.x, b.x));
        if (!range)
            continue;
        const auto& [k_lo, k_hi] = *range;
        BigInt n = k_hi - k_lo + 1;
        Dyadic piece = Dyadic(n) * a.value;
        if (a.value != b.value) {
            // sum of (y_k - a.x) over the range, y_k = start + k*step
            BigInt index_sum = (k_lo + k_hi) * n / 2;
            Dyadic offsets = Dyadic(n) * (start - a.x) + Dyadic(index_sum) * step;
            piece += div_exact((b.value - a.value) * offsets, b.x - a.x);
        }
        total += piece;
    }
    return total;
}

inline Dyadic sum_pl_over_ap(const PiecewiseLinear& f, const Progression& p)
{
    return sum_pl_over_ap(f, p.start, p.step, p.count);
}

} // namespace dyadlab::lattice
