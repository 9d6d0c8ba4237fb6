#pragma once

// Decreasing-gap Λ and a continuous f whose translate series diverges on
// [0,1] and converges on [4,5]. Decade j carries Λ1_j (step 2^-2^j on
// [10j-10, 10j-2)), Λ2_j (step 2^-2^(j+1) on [10j-2, 10j)), and a plateau of
// height 2^-2^(j+1) on [10j, 10j+1].

#include <cstdint>
#include <string>
#include <vector>

#include "dyadlab/dyadic.hpp"
#include "dyadlab/gap_sequence.hpp"
#include "dyadlab/interval.hpp"
#include "dyadlab/piecewise_linear.hpp"
#include "dyadlab/progression.hpp"
#include "dyadlab/sampling.hpp"
#include "dyadlab/witness.hpp"

namespace dyadlab::interior_gap {

using lattice::GapBlockSeq;
using lattice::LatticeSegment;

inline void check_jmax(std::int64_t jmax)
{
    if (jmax < 1 || jmax > 18)
        throw InvalidArgument("decade count must lie in [1, 18]");
}

inline Dyadic height(std::int64_t j) { return Dyadic::pow2(-(std::int64_t{1} << (j + 1))); }

/// Per-decade majorant 2 * 2^(2^j) * 2^-2^(j+1).
inline Dyadic decade_majorant(std::int64_t j) { return Dyadic::pow2(1 + (std::int64_t{1} << j)) * height(j); }

/// Breakpoints (10j - 1/4, 0), (10j, h), (10j + 1, h), (10j + 5/4, 0).
inline PiecewiseLinear decade_tent(std::int64_t j)
{
    Dyadic c(10 * j);
    return PiecewiseLinear({{c - Dyadic(1, -2), 0}, {c, height(j)}, {c + 1, height(j)}, {c + Dyadic(5, -2), 0}});
}

inline PiecewiseLinear build_f(std::int64_t jmax)
{
    check_jmax(jmax);
    std::vector<PiecewiseLinear> parts;
    for (std::int64_t j = 1; j <= jmax; ++j)
        parts.push_back(decade_tent(j));
    return PiecewiseLinear::concat(parts);
}

inline std::vector<LatticeSegment> decade_segments(std::int64_t j)
{
    Dyadic lo(10 * j - 10);
    Dyadic mid(10 * j - 2);
    Dyadic hi(10 * j);
    return {
        {Dyadic::pow2(-(std::int64_t{1} << j)), DyInterval::closed_open(lo, mid), "L1:" + std::to_string(j)},
        {Dyadic::pow2(-(std::int64_t{1} << (j + 1))), DyInterval::closed_open(mid, hi), "L2:" + std::to_string(j)},
    };
}

struct Thm33Construction {
    std::int64_t jmax = 0;
    GapBlockSeq seq;
    PiecewiseLinear f;
};

/// Decades 1..jmax of Λ (all points below 10 jmax) and f over the same decades.
inline Thm33Construction build_thm33(std::int64_t jmax)
{
    check_jmax(jmax);
    std::vector<LatticeSegment> segs;
    for (std::int64_t j = 1; j <= jmax; ++j)
        for (auto& s : decade_segments(j))
            segs.push_back(std::move(s));
    return {jmax, lattice::merge_lattice_segments(segs), build_f(jmax)};
}

inline Dyadic series_sum(const PiecewiseLinear& f, const GapBlockSeq& seq, const Dyadic& x)
{
    Dyadic total;
    for (const auto& p : seq.progressions())
        total += lattice::sum_pl_over_ap(f, x + p.start, p.step, p.count);
    return total;
}

/// Σ_{λ < 10 jmax} f(x+λ) for x in [0, 1].
inline Dyadic divergence_partial(const Dyadic& x, std::int64_t jmax)
{
    if (!DyInterval::closed(0, 1).contains(x))
        throw OutOfInterval(x.str() + " is not in [0,1]");
    auto c = build_thm33(jmax);
    return series_sum(c.f, c.seq, x);
}

/// Guaranteed growth from decade jmax to jmax + 1 at x in [0,1]: the plateau
/// [10 jmax, 10 jmax + 1] meets at least 2^(2^(jmax+1)) points of step
/// 2^-2^(jmax+1), each worth the plateau height.
inline Dyadic decade_floor(std::int64_t jmax)
{
    return Dyadic::pow2(std::int64_t{1} << (jmax + 1)) * height(jmax);
}

/// S_j(x) = Σ_λ f_j(x+λ) with f_j the decade-j part of f.
inline Dyadic decade_sum(const GapBlockSeq& seq, std::int64_t j, const Dyadic& x)
{
    return series_sum(decade_tent(j), seq, x);
}

/// For x in [4,5]: S_j(x) <= 2 * 2^(2^j) * 2^-2^(j+1) for every j <= jmax.
/// The last report carries the total and the closed-form tail majorant
/// 4 * 2^-2^(jmax+1) for the decades beyond jmax.
inline std::vector<WitnessReport> convergence_tail_check(const Dyadic& x, std::int64_t jmax)
{
    if (!DyInterval::closed(4, 5).contains(x))
        throw OutOfInterval(x.str() + " is not in [4,5]");
    auto c = build_thm33(jmax);
    std::vector<WitnessReport> out;
    Dyadic total;
    Dyadic bound_total;
    bool ok = true;
    for (std::int64_t j = 1; j <= jmax; ++j) {
        Dyadic s = decade_sum(c.seq, j, x);
        Dyadic bound = decade_majorant(j);
        total += s;
        bound_total += bound;
        ok = ok && s <= bound;
        WitnessReport r = make_report("thm33.converge.decade", s, bound, s <= bound);
        r.with("x", x.str()).with("j", std::to_string(j));
        out.push_back(std::move(r));
    }
    Dyadic tail = Dyadic::pow2(2 - (std::int64_t{1} << (jmax + 1)));
    WitnessReport r = make_report("thm33.converge.total", total, bound_total + tail, ok && total <= bound_total);
    r.with("x", x.str()).with("jmax", std::to_string(jmax)).with("tail_majorant", tail.str());
    out.push_back(std::move(r));
    return out;
}

/// Samples y in (xC, 10 jmax] and checks every decade sum S_j(y), j <= jmax,
/// against the per-decade majorant. Reports the number of violations.
inline WitnessReport thm34_probe(const Dyadic& xC, std::int64_t jmax, std::int64_t samples, std::uint64_t seed)
{
    if (!DyInterval::open(4, 5).contains(xC))
        throw OutOfInterval(xC.str() + " is not interior to [4,5]");
    if (samples < 0)
        throw InvalidArgument("sample count must be non-negative");
    auto c = build_thm33(jmax);
    Rng rng(seed);
    DyInterval range = DyInterval::open_closed(xC, Dyadic(10 * jmax));
    std::int64_t violations = 0;
    std::string first_bad = "none";
    for (std::int64_t s = 0; s < samples; ++s) {
        Dyadic y = sample_dyadic(rng, range);
        for (std::int64_t j = 1; j <= jmax; ++j) {
            if (decade_sum(c.seq, j, y) > decade_majorant(j)) {
                if (violations == 0)
                    first_bad = y.str() + "@" + std::to_string(j);
                ++violations;
            }
        }
    }
    WitnessReport r = make_report("thm33.probe", BigInt(violations), BigInt(0), violations == 0);
    r.with("xC", xC.str()).with("jmax", std::to_string(jmax)).with("samples", std::to_string(samples));
    r.with("seed", std::to_string(seed)).with("first_violation", first_bad);
    return r;
}

} // namespace dyadlab::interior_gap
