#pragma once

// Asymptotically dense Λ = Λ1 ∪ Λ2 with tents f_j sitting on U_j = [2^j, 2^j + 2^-2^j].
// Λ1_j steers every x in the j-th enumerated dyadic interval across U_j;
// Λ2 fills the gaps without making the tents' series diverge.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dyadlab/dyadic.hpp"
#include "dyadlab/gap_sequence.hpp"
#include "dyadlab/interval.hpp"
#include "dyadlab/piecewise_linear.hpp"
#include "dyadlab/progression.hpp"
#include "dyadlab/witness.hpp"

namespace dyadlab::dense {

using lattice::GapBlockSeq;
using lattice::LatticeSegment;
using lattice::Progression;

/// First j for which Λ2_j exists.
inline constexpr std::int64_t lambda2_first = 10;

/// I_j = [(k-1) 2^-l, k 2^-l].
struct EnumeratedInterval {
    std::int64_t j = 0;
    std::int64_t level = 0;
    BigInt k;
    DyInterval iv;
};

/// Dyadic intervals in stage order: stage t scans every interval of level
/// l <= t inside [-t, t] by (level, left endpoint), and emits a candidate as
/// I_j (j = emitted + 1) once I_j ⊆ [-j, j] and 2^-l >= 1/j.
inline std::vector<EnumeratedInterval> enum_intervals(std::int64_t count)
{
    if (count < 1)
        throw InvalidArgument("enum_intervals needs count >= 1");
    std::vector<EnumeratedInterval> out;
    std::set<std::pair<std::int64_t, BigInt>> emitted;
    for (std::int64_t t = 1; static_cast<std::int64_t>(out.size()) < count; ++t) {
        if (t > 62)
            throw BudgetExceeded("interval enumeration did not finish by stage 62");
        for (std::int64_t l = 0; l <= t && static_cast<std::int64_t>(out.size()) < count; ++l) {
            BigInt scale = pow2_int(l);
            BigInt k_lo = -BigInt(t) * scale + 1;
            BigInt k_hi = BigInt(t) * scale;
            for (BigInt k = k_lo; k <= k_hi && static_cast<std::int64_t>(out.size()) < count; ++k) {
                if (emitted.count({l, k}))
                    continue;
                std::int64_t j = static_cast<std::int64_t>(out.size()) + 1;
                Dyadic lo = Dyadic(BigInt(k - 1), -l);
                Dyadic hi = Dyadic(k, -l);
                if (lo < Dyadic(-j) || hi > Dyadic(j) || scale > j)
                    continue;
                emitted.insert({l, k});
                out.push_back({j, l, k, DyInterval::closed(lo, hi)});
            }
        }
    }
    return out;
}

/// Closed interval with the same centre and three times the length.
inline DyInterval tripled(const DyInterval& iv)
{
    Dyadic len = iv.measure();
    return DyInterval::closed(iv.lo() - len, iv.hi() + len);
}

inline Dyadic u_lo(std::int64_t j) { return Dyadic::pow2(j); }
inline Dyadic u_hi(std::int64_t j) { return Dyadic::pow2(j) + Dyadic::pow2(-(std::int64_t{1} << j)); }
inline Dyadic ramp_width(std::int64_t j) { return Dyadic::pow2(-(std::int64_t{1} << j) - j - 1); }

inline void check_j(std::int64_t j)
{
    if (j < 1 || j > 30)
        throw InvalidArgument("tent index j must lie in [1, 30]");
}

/// 2^-j on U_j, zero outside the fattened Ū_j, linear in between.
inline PiecewiseLinear tent_f(std::int64_t j)
{
    check_j(j);
    return PiecewiseLinear::tent(u_lo(j), u_hi(j), Dyadic::pow2(-j), ramp_width(j));
}

/// Open support (ā_j, b̄_j) of f_j.
inline DyInterval tent_support(std::int64_t j)
{
    return DyInterval::open(u_lo(j) - ramp_width(j), u_hi(j) + ramp_width(j));
}

/// step*Z ∩ window as a progression, or nullopt when empty.
inline std::optional<Progression> lattice_in(const Dyadic& step, const DyInterval& window, std::string tag)
{
    BigInt k_lo = ceil_div(window.lo(), step);
    if (!window.lo_closed() && Dyadic(k_lo) * step == window.lo())
        k_lo += 1;
    BigInt k_hi = floor_div(window.hi(), step);
    if (!window.hi_closed() && Dyadic(k_hi) * step == window.hi())
        k_hi -= 1;
    if (k_lo > k_hi)
        return std::nullopt;
    return Progression{Dyadic(k_lo) * step, step, BigInt(k_hi - k_lo + 1), std::move(tag)};
}

inline Dyadic lambda1_step(std::int64_t j) { return Dyadic::pow2(-(std::int64_t{1} << j) - j); }

/// [a_j - b_{I_j}, b_j - a_{I_j}], closed.
inline DyInterval lambda1_window(std::int64_t j, const DyInterval& Ij)
{
    return DyInterval::closed(u_lo(j) - Ij.hi(), u_hi(j) - Ij.lo());
}

/// (2^(j-1) + 2(j-1), 2^j + 2j].
inline DyInterval lambda2_window(std::int64_t j)
{
    return DyInterval::open_closed(Dyadic::pow2(j - 1) + Dyadic(2 * (j - 1)), Dyadic::pow2(j) + Dyadic(2 * j));
}

inline Progression lambda1(std::int64_t j, const DyInterval& Ij)
{
    check_j(j);
    return *lattice_in(lambda1_step(j), lambda1_window(j, Ij), "L1:" + std::to_string(j));
}

/// Λ2_j; also defined for j < 10 so that small-j behaviour can be reported.
inline Progression lambda2(std::int64_t j)
{
    check_j(j);
    return *lattice_in(Dyadic::pow2(-j), lambda2_window(j), "L2:" + std::to_string(j));
}

inline Dyadic sum_over(const PiecewiseLinear& f, const Progression& p, const Dyadic& x)
{
    return lattice::sum_pl_over_ap(f, x + p.start, p.step, p.count);
}

inline Dyadic sum_over(const PiecewiseLinear& f, const GapBlockSeq& seq, const Dyadic& x)
{
    Dyadic total;
    for (const auto& p : seq.progressions())
        total += sum_over(f, p, x);
    return total;
}

/// Σ_{λ∈Λ1_j} f_j(x+λ) >= 1 for x in I_j.
inline WitnessReport lower_bound_check(const EnumeratedInterval& e, const Dyadic& x)
{
    if (!e.iv.contains(x))
        throw OutOfInterval(x.str() + " is not in I_" + std::to_string(e.j) + " = " + e.iv.str());
    Dyadic s = sum_over(tent_f(e.j), lambda1(e.j, e.iv), x);
    WitnessReport r = make_report("thm31.lower", s, Dyadic(1), s >= Dyadic(1));
    r.with("j", std::to_string(e.j)).with("x", x.str());
    return r;
}

/// Σ_{λ∈Λ1_j} f_j(x+λ) = 0 for x in [-j, j] outside the tripled interval.
inline WitnessReport outside_zero_check(const EnumeratedInterval& e, const Dyadic& x)
{
    if (!DyInterval::closed(Dyadic(-e.j), Dyadic(e.j)).contains(x) || tripled(e.iv).contains(x))
        throw OutOfInterval(x.str() + " is not in [-j,j] minus the tripled I_" + std::to_string(e.j));
    Dyadic s = sum_over(tent_f(e.j), lambda1(e.j, e.iv), x);
    WitnessReport r = make_report("thm31.outside", s, Dyadic(0), s.is_zero());
    r.with("j", std::to_string(e.j)).with("x", x.str());
    return r;
}

/// [-j, j] minus the closed tripled interval, as at most two pieces.
inline std::vector<DyInterval> outside_region(const EnumeratedInterval& e)
{
    std::vector<DyInterval> out;
    DyInterval t = tripled(e.iv);
    Dyadic lo(-e.j);
    Dyadic hi(e.j);
    if (lo < t.lo())
        out.push_back(DyInterval::closed_open(lo, min(t.lo(), hi)));
    if (t.hi() < hi)
        out.push_back(DyInterval::open_closed(max(t.hi(), lo), hi));
    return out;
}

/// Σ_{λ∈Λ1_j} f_{j0}(x+λ) for j != j0. Asserted to be 0 only for j0 >= 10.
inline WitnessReport cross_term_zero_check(std::int64_t j0, const EnumeratedInterval& e, const Dyadic& x)
{
    if (j0 == e.j)
        throw InvalidArgument("cross term needs j != j0");
    if (abs(x) > Dyadic(j0))
        throw OutOfInterval("cross term needs |x| <= j0");
    Dyadic s = sum_over(tent_f(j0), lambda1(e.j, e.iv), x);
    WitnessReport r = make_report("thm31.cross", s, Dyadic(0), s.is_zero());
    r.with("j0", std::to_string(j0)).with("j", std::to_string(e.j)).with("x", x.str());
    if (j0 < lambda2_first)
        r.with("mode", "report-only");
    return r;
}

inline std::vector<std::int64_t> indices_in(const IntervalUnion& G, const std::vector<EnumeratedInterval>& enumd)
{
    std::vector<std::int64_t> out;
    for (const auto& e : enumd)
        if (G.contains(tripled(e.iv)))
            out.push_back(e.j);
    return out;
}

inline PiecewiseLinear f_sum(const std::vector<std::int64_t>& js)
{
    std::vector<std::int64_t> sorted = js;
    std::sort(sorted.begin(), sorted.end());
    std::vector<PiecewiseLinear> parts;
    for (auto j : sorted)
        parts.push_back(tent_f(j));
    return PiecewiseLinear::concat(parts);
}

struct Thm31Construction {
    std::int64_t jmax = 0;
    IntervalUnion G;
    std::vector<EnumeratedInterval> intervals;
    std::vector<std::int64_t> JG;
    GapBlockSeq lambda;
    PiecewiseLinear fG;
};

/// Λ1_j for j <= jmax (when with_l1) and Λ2_j for 10 <= j <= jmax (when
/// with_l2), merged without duplicates.
inline std::optional<GapBlockSeq> lambda_prefix(const std::vector<EnumeratedInterval>& enumd, std::int64_t jmax,
                                                bool with_l1, bool with_l2)
{
    std::vector<LatticeSegment> segs;
    for (const auto& e : enumd) {
        if (e.j > jmax)
            break;
        if (with_l1)
            segs.push_back({lambda1_step(e.j), lambda1_window(e.j, e.iv), "L1:" + std::to_string(e.j)});
        if (with_l2 && e.j >= lambda2_first)
            segs.push_back({Dyadic::pow2(-e.j), lambda2_window(e.j), "L2:" + std::to_string(e.j)});
    }
    if (segs.empty())
        return std::nullopt;
    return lattice::merge_lattice_segments(segs);
}

inline Thm31Construction build_thm31(std::int64_t jmax, const IntervalUnion& G)
{
    check_j(jmax);
    Thm31Construction c;
    c.jmax = jmax;
    c.G = G;
    c.intervals = enum_intervals(jmax);
    c.JG = indices_in(G, c.intervals);
    c.lambda = *lambda_prefix(c.intervals, jmax, true, true);
    c.fG = f_sum(c.JG);
    return c;
}

/// Σ over the Λ prefix (Λ1, plus Λ2 when asked) of f_G(x+λ), where f_G sums
/// f_j over j <= jmax with tripled I_j inside G.
inline Dyadic fG_sum_partial_31(const Dyadic& x, const IntervalUnion& G, std::int64_t jmax, bool include_lambda2,
                                bool include_lambda1 = true)
{
    check_j(jmax);
    auto enumd = enum_intervals(jmax);
    auto js = indices_in(G, enumd);
    auto seq = lambda_prefix(enumd, jmax, include_lambda1, include_lambda2);
    if (js.empty() || !seq)
        return {};
    return sum_over(f_sum(js), *seq, x);
}

/// #{λ ∈ Λ2_j : f_j(x+λ) != 0}; at most one for j >= 10.
inline std::pair<BigInt, WitnessReport> lambda2_hit_count(std::int64_t j, const Dyadic& x)
{
    Progression p = lambda2(j);
    BigInt n = lattice::count_ap_in_interval(p.start, p.step, p.count, tent_support(j).shifted(-x));
    WitnessReport r = make_report("thm31.lambda2_hits", n, BigInt(1), n <= 1);
    r.with("j", std::to_string(j)).with("x", x.str());
    if (j < lambda2_first)
        r.with("mode", "report-only");
    return {n, r};
}

/// Σ_{λ∈Λ2} Σ_{j<=jmax} f_j(x+λ) <= head + Σ_{j=M_x+1}^{jmax} 2^-j, where
/// M_x = max(10, floor|x|) and head keeps the j <= M_x terms exactly.
inline WitnessReport lambda2_tail_check(const Dyadic& x, std::int64_t jmax)
{
    check_j(jmax);
    BigInt fx = abs(x).floor();
    std::int64_t M = std::max<std::int64_t>(lambda2_first, fx.fits_slong_p() ? fx.get_si() : jmax);
    Dyadic head;
    Dyadic lhs;
    Dyadic tail;
    for (std::int64_t j = 1; j <= jmax; ++j) {
        Dyadic s;
        for (std::int64_t i = lambda2_first; i <= jmax; ++i)
            s += sum_over(tent_f(j), lambda2(i), x);
        lhs += s;
        if (j <= M)
            head += s;
        else
            tail += Dyadic::pow2(-j);
    }
    Dyadic rhs = head + tail;
    WitnessReport r = make_report("thm31.lambda2_tail", lhs, rhs, lhs <= rhs);
    r.with("x", x.str()).with("jmax", std::to_string(jmax)).with("M_x", std::to_string(M));
    r.with("head", head.str()).with("tail_beyond_jmax", Dyadic::pow2(-jmax).str());
    return r;
}

/// Largest gap of the merged Λ inside (2^(j-1) + 2(j-1), 2^j + 2j] is <= 2^-j.
inline WitnessReport density_check(const GapBlockSeq& merged, std::int64_t j)
{
    DyInterval w = lambda2_window(j);
    auto g = lattice::max_gap_within(merged, w.lo(), w.hi());
    Dyadic bound = Dyadic::pow2(-j);
    WitnessReport r{"thm31.density", {}, g ? g->str() : "none", bound.str(), g && *g <= bound};
    r.with("j", std::to_string(j));
    return r;
}

} // namespace dyadlab::dense
