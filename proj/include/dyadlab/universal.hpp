#pragma once

// The universal decreasing-gap Λ: one pair of gap blocks per index (j,k), the
// target sets U_{j,k}, and exact checks of the covering, integrality, and
// escape-measure claims behind it.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dyadlab/dyadic.hpp"
#include "dyadlab/gap_sequence.hpp"
#include "dyadlab/interval.hpp"
#include "dyadlab/piecewise_linear.hpp"
#include "dyadlab/progression.hpp"
#include "dyadlab/witness.hpp"

namespace dyadlab::universal {

using lattice::GapBlock;
using lattice::GapBlockSeq;
using lattice::PeriodicIntervalSet;

/// Largest row index accepted; 2j*2^j must stay far inside int64.
inline constexpr std::int64_t max_row = 40;

struct IndexJK {
    std::int64_t j = 1;
    std::int64_t k = 0;

    friend auto operator<=>(const IndexJK&, const IndexJK&) = default;

    std::string str() const { return std::to_string(j) + "," + std::to_string(k); }

    static IndexJK parse(std::string_view text)
    {
        auto sep = text.find_first_of(",:");
        if (sep == std::string_view::npos)
            throw ParseError("index must look like 'j,k': '" + std::string(text) + "'");
        return {detail::parse_i64(text.substr(0, sep)), detail::parse_i64(text.substr(sep + 1))};
    }
};

/// Number of k values in row j: 2j * 2^j.
inline std::int64_t row_length(std::int64_t j)
{
    if (j < 1 || j > max_row)
        throw InvalidArgument("row index j must lie in [1, " + std::to_string(max_row) + "]");
    return 2 * j * (std::int64_t{1} << j);
}

inline bool is_valid(const IndexJK& i)
{
    return i.j >= 1 && i.j <= max_row && i.k >= 0 && i.k < row_length(i.j);
}

inline void validate(const IndexJK& i)
{
    if (!is_valid(i))
        throw InvalidArgument("invalid index (" + i.str() + "): need j >= 1 and 0 <= k < 2j*2^j");
}

inline IndexJK idx_successor(const IndexJK& i)
{
    validate(i);
    if (i.k + 1 == row_length(i.j))
        return {i.j + 1, 0};
    return {i.j, i.k + 1};
}

inline IndexJK idx_predecessor(const IndexJK& i)
{
    validate(i);
    if (i.j == 1 && i.k == 0)
        throw NoPredecessor("(1,0) has no predecessor");
    if (i.k == 0)
        return {i.j - 1, row_length(i.j - 1) - 1};
    return {i.j, i.k - 1};
}

/// L with a = 2^L and E = 2^-L.
inline std::int64_t level(const IndexJK& i)
{
    validate(i);
    return row_length(i.j) + i.k;
}

struct StepConstants {
    IndexJK index;
    Dyadic aI;
    Dyadic bI;
    Dyadic a;
    Dyadic b;
    Dyadic E;
    BigInt span; // n1 - n0
    std::optional<BigInt> n0;
    std::optional<BigInt> n1;
};

inline StepConstants step_constants(const IndexJK& i)
{
    std::int64_t L = level(i);
    StepConstants c;
    c.index = i;
    c.aI = Dyadic(i.j) - Dyadic(i.k + 1).scaled(-i.j);
    c.bI = Dyadic(i.j) - Dyadic(i.k).scaled(-i.j);
    c.a = Dyadic::pow2(L);
    c.E = Dyadic::pow2(-L);
    c.b = c.a + c.E;
    // 2^-j E^-2 + 2 E^-1
    c.span = pow2_int(2 * L - i.j) + pow2_int(L + 1);
    return c;
}

inline DyInterval i_interval(const IndexJK& i)
{
    auto c = step_constants(i);
    return DyInterval::closed(c.aI, c.bI);
}

/// U_{j,k}: E^-1 closed components of width E^3, spaced E^2, starting at a.
inline PeriodicIntervalSet u_set(const IndexJK& i)
{
    auto c = step_constants(i);
    return {c.a, c.E * c.E, c.E * c.E * c.E, pow2_int(level(i)), true, true};
}

namespace detail {

inline std::string fine_tag(const IndexJK& i) { return "u:" + i.str() + ":fine"; }
inline std::string bridge_tag(const IndexJK& i) { return "u:" + i.str() + ":bridge"; }

/// Parses "u:j,k:fine" / "u:j,k:bridge".
inline std::optional<std::pair<IndexJK, bool>> parse_tag(const std::string& tag)
{
    if (tag.rfind("u:", 0) != 0)
        return std::nullopt;
    auto second = tag.find(':', 2);
    if (second == std::string::npos)
        return std::nullopt;
    std::string kind = tag.substr(second + 1);
    if (kind != "fine" && kind != "bridge")
        return std::nullopt;
    return std::make_pair(IndexJK::parse(tag.substr(2, second - 2)), kind == "fine");
}

} // namespace detail

/// λ_0 = a_{1,0} - b_{I_{1,0}}; then for every index strictly below `limit`
/// a fine block (E^2 - E^3, n1 - n0) and a bridge block (E^2/2, c) reaching
/// a_succ - b_{I_succ}. The last point is λ_{n0(limit)}.
inline GapBlockSeq build_universal(const IndexJK& limit)
{
    validate(limit);
    IndexJK first{1, 0};
    auto c0 = step_constants(first);
    GapBlockSeq seq(c0.a - c0.bI);
    for (IndexJK i = first; i < limit; i = idx_successor(i)) {
        auto c = step_constants(i);
        Dyadic E2 = c.E * c.E;
        seq.append({E2 - E2 * c.E, c.span, detail::fine_tag(i)});
        auto s = step_constants(idx_successor(i));
        Dyadic target = s.a - s.bI;
        Dyadic bridge_gap = E2.scaled(-1);
        BigInt count = div_exact(target - seq.last(), bridge_gap).to_integer();
        if (sgn(count) <= 0)
            throw NotExact("non-positive bridge count after step (" + i.str() + ")");
        seq.append({bridge_gap, count, detail::bridge_tag(i)});
    }
    return seq;
}

/// Where each construction step sits inside a sequence, recovered from tags.
struct StepInfo {
    IndexJK index;
    BigInt n0;
    BigInt n1;
    std::size_t fine_block = 0;
    std::optional<std::size_t> bridge_block;
};

inline std::vector<StepInfo> universal_steps(const GapBlockSeq& seq)
{
    std::vector<StepInfo> out;
    const auto& blocks = seq.blocks();
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        auto parsed = detail::parse_tag(blocks[b].tag);
        if (!parsed)
            throw ParseError("block " + std::to_string(b) + " has no universal tag: '" + blocks[b].tag + "'");
        auto [idx, fine] = *parsed;
        if (fine) {
            BigInt n0 = seq.block_first_index(b);
            out.push_back({idx, n0, BigInt(n0 + blocks[b].count), b, std::nullopt});
        } else {
            if (out.empty() || out.back().index != idx || out.back().bridge_block)
                throw ParseError("bridge block " + std::to_string(b) + " does not follow its fine block");
            out.back().bridge_block = b;
        }
    }
    return out;
}

inline std::optional<StepInfo> find_step(const GapBlockSeq& seq, const IndexJK& i)
{
    for (auto& s : universal_steps(seq))
        if (s.index == i)
            return s;
    return std::nullopt;
}

/// Constants with n0, n1 filled in from a built sequence.
inline StepConstants step_constants(const IndexJK& i, const GapBlockSeq& seq)
{
    auto c = step_constants(i);
    if (auto s = find_step(seq, i)) {
        c.n0 = s->n0;
        c.n1 = s->n1;
    }
    return c;
}

/// a <= a_succ / 2, E >= 2 E_succ, and E/2 = m * E_succ with m a positive integer.
inline WitnessReport check_lemma_useful(const IndexJK& i)
{
    auto c = step_constants(i);
    IndexJK si = idx_successor(i);
    auto s = step_constants(si);
    Dyadic half = c.E.scaled(-1);
    bool a_ok = c.a <= s.a.scaled(-1);
    bool e_ok = c.E >= s.E.scaled(1);
    std::optional<Dyadic> m;
    try {
        m = div_exact(half, s.E);
    } catch (const NotExact&) {
    }
    bool m_ok = m && m->is_integer() && m->sign() > 0;
    WitnessReport r{"universal.lemma", {}, half.str(), s.E.str(), a_ok && e_ok && m_ok};
    r.with("index", i.str()).with("successor", si.str());
    r.with("m", m ? m->str() : "not-exact");
    r.with("a_le_half_next", a_ok ? "true" : "false");
    r.with("E_ge_twice_next", e_ok ? "true" : "false");
    return r;
}

/// Divisibility claims at each built step:
///   λ_{n1} / E^2, (E^2/2) / E_succ^2, λ_{n1} / E_succ^2, λ_{n0(succ)} / E_succ^2.
inline std::vector<WitnessReport> check_integrality(const GapBlockSeq& seq)
{
    std::vector<WitnessReport> out;
    for (const auto& st : universal_steps(seq)) {
        auto c = step_constants(st.index);
        IndexJK si = idx_successor(st.index);
        auto s = step_constants(si);
        Dyadic E2 = c.E * c.E;
        Dyadic Es2 = s.E * s.E;
        Dyadic lam1 = seq.value_at(st.n1);
        std::vector<std::pair<std::string, std::pair<Dyadic, Dyadic>>> claims = {
            {"lambda_n1/E^2", {lam1, E2}},
            {"(E^2/2)/E_succ^2", {E2.scaled(-1), Es2}},
            {"lambda_n1/E_succ^2", {lam1, Es2}},
        };
        if (st.bridge_block) {
            BigInt n0s = st.n1 + seq.blocks()[*st.bridge_block].count;
            claims.push_back({"lambda_n0_succ/E_succ^2", {seq.value_at(n0s), Es2}});
        }
        for (const auto& [name, ratio] : claims) {
            WitnessReport r{"universal.integrality", {}, ratio.first.str(), ratio.second.str(), false};
            r.with("index", st.index.str()).with("ratio", name);
            try {
                Dyadic q = div_exact(ratio.first, ratio.second);
                r.pass = q.is_integer();
                r.with("quotient", q.is_integer() ? q.to_integer().get_str() : q.str());
            } catch (const NotExact&) {
                r.with("quotient", "not-exact");
            }
            out.push_back(std::move(r));
        }
    }
    return out;
}

/// b - aI <= λ_{n1} < a - bI + 1, and λ_{n1} matches its closed form
/// a - aI + 2E - 2^-j E - 2E^2.
inline std::vector<WitnessReport> check_step_bounds(const GapBlockSeq& seq)
{
    std::vector<WitnessReport> out;
    for (const auto& st : universal_steps(seq)) {
        auto c = step_constants(st.index);
        Dyadic lam1 = seq.value_at(st.n1);
        Dyadic closed = c.a - c.aI + c.E.scaled(1) - c.E.scaled(-st.index.j) - (c.E * c.E).scaled(1);
        WitnessReport lo{"universal.lambda_n1.lower", {}, (c.b - c.aI).str(), lam1.str(), c.b - c.aI <= lam1};
        WitnessReport hi{"universal.lambda_n1.upper", {}, lam1.str(), (c.a - c.bI + 1).str(), lam1 < c.a - c.bI + 1};
        WitnessReport cf{"universal.lambda_n1.closed_form", {}, lam1.str(), closed.str(), lam1 == closed};
        for (auto* r : {&lo, &hi, &cf}) {
            r->with("index", st.index.str());
            out.push_back(std::move(*r));
        }
    }
    return out;
}

struct CoverWitness {
    Dyadic x;
    IndexJK index;
    BigInt nx;
    BigInt nxp;
    Dyadic landing;
    BigInt component;
};

/// n_x = least n with x + λ_n > a (by inverting the counting function),
/// n'_x = n_x + floor((x + λ_{n_x} - a) / E^3), and x + λ_{n'_x} in U_{j,k}.
inline CoverWitness covering_witness(const Dyadic& x, const IndexJK& i, const GapBlockSeq& seq)
{
    auto c = step_constants(i);
    if (!DyInterval::closed(c.aI, c.bI).contains(x))
        throw OutOfInterval(x.str() + " is not in I_(" + i.str() + ")");
    auto st = find_step(seq, i);
    if (!st)
        throw PrefixTooShort("step (" + i.str() + ") is not built in this sequence");
    Dyadic E2 = c.E * c.E;
    Dyadic E3 = E2 * c.E;

    if (x + seq.value_at(st->n0) > c.a)
        throw Violation("x + lambda_n0 > a at x=" + x.str());
    BigInt nx = seq.count_upto(c.a - x);
    if (nx > seq.total_gaps())
        throw PrefixTooShort("no lambda with x + lambda > a");
    Dyadic over = x + seq.value_at(nx) - c.a;
    if (over > E2 - E3)
        throw Violation("x + lambda_nx - a exceeds E^2 - E^3 at x=" + x.str());
    BigInt nxp = nx + floor_div(over, E3);
    if (nx > st->n1 || nxp > st->n1)
        throw Violation("witness index beyond n1 at x=" + x.str());
    Dyadic landing = x + seq.value_at(nxp);
    auto [comp, offset] = floor_ratio(landing - c.a, E2);
    if (sgn(comp) < 0 || comp >= pow2_int(level(i)) || offset > E3)
        throw Violation("landing " + landing.str() + " is outside U_(" + i.str() + ")");
    return {x, i, nx, nxp, landing, comp};
}

struct UEntry {
    IndexJK index;
    PeriodicIntervalSet set;
};

/// Indices i <= limit whose closed I_i lies inside G.
inline std::vector<UEntry> build_uG(const IntervalUnion& G, const IndexJK& limit)
{
    validate(limit);
    std::vector<UEntry> out;
    for (IndexJK i{1, 0};; i = idx_successor(i)) {
        if (G.contains(i_interval(i)))
            out.push_back({i, u_set(i)});
        if (i == limit)
            break;
    }
    return out;
}

/// #{n : x + λ_n in U_G}, over all points of the sequence.
inline BigInt fG_partial_sum(const Dyadic& x, const std::vector<UEntry>& uG, const GapBlockSeq& seq)
{
    BigInt total = 0;
    for (const auto& p : seq.progressions())
        for (const auto& u : uG)
            total += lattice::count_ap_in_periodic(x + p.start, p.step, p.count, u.set);
    return total;
}

inline Dyadic escape_bound(const IndexJK& i)
{
    return Dyadic(4 * i.j + 3) * step_constants(i).E;
}

/// Right side of the escape decomposition: 4jE for A ∪ B, plus the strips
/// [a - λ_{n1}, aI] of length 2E - 2^-j E - 2E^2 and [bI, b - λ_{n0}] of length E.
struct EscapeTerms {
    Dyadic ab;
    Dyadic left_strip;
    Dyadic right_strip;
    Dyadic total() const { return ab + left_strip + right_strip; }
};

inline EscapeTerms escape_terms(const IndexJK& i)
{
    auto c = step_constants(i);
    return {Dyadic(4 * i.j) * c.E, c.E.scaled(1) - c.E.scaled(-i.j) - (c.E * c.E).scaled(1), c.E};
}

/// Symbolic chain only: decomposition <= (4j+3)E, with each strip bound.
inline std::vector<WitnessReport> escape_symbolic(const IndexJK& i)
{
    auto t = escape_terms(i);
    auto c = step_constants(i);
    std::vector<WitnessReport> out;
    out.push_back(make_report("universal.escape.decomposition", t.total(), escape_bound(i), t.total() <= escape_bound(i)));
    out.push_back(make_report("universal.escape.left_strip", t.left_strip, c.E.scaled(1), t.left_strip <= c.E.scaled(1)));
    out.push_back(make_report("universal.escape.right_strip", t.right_strip, c.E, t.right_strip == c.E));
    for (auto& r : out)
        r.with("index", i.str());
    return out;
}

struct EscapeResult {
    Dyadic measure;
    std::vector<WitnessReport> reports;
};

/// Default cap on grid cells and on (translate, component) marks.
inline constexpr std::int64_t escape_budget = std::int64_t{1} << 27;

/// Exact μ([-j,j] ∩ (U_{j,k} - Λ) \ I_{j,k}) by marking translated
/// components on an integer grid fine enough to hold every endpoint.
/// The sequence must reach b + j so that it contains every relevant λ.
inline EscapeResult escape_measure_bruteforce(const IndexJK& i, const GapBlockSeq& seq,
                                              std::int64_t budget = escape_budget)
{
    validate(i);
    if (i.j >= 2)
        throw BudgetExceeded("escape brute force is limited to j = 1; (" + i.str() + ") requested");
    auto c = step_constants(i);
    Dyadic J(i.j);
    Dyadic lo_lam = c.a - J;
    Dyadic hi_lam = c.b + J;
    if (seq.last() < hi_lam)
        throw PrefixTooShort("sequence ends at " + seq.last().str() + ", needs " + hi_lam.str());
    Dyadic E2 = c.E * c.E;
    Dyadic E3 = E2 * c.E;

    struct Run {
        Dyadic first;
        Dyadic step;
        BigInt count;
    };
    std::vector<Run> runs;
    std::int64_t unit = std::min(E3.exponent(), J.exponent());
    for (const auto& p : seq.progressions()) {
        auto r = lattice::ap_index_range(p.start, p.step, p.count, DyInterval::closed(lo_lam, hi_lam));
        if (!r)
            continue;
        Run run{p.at(r->first), p.step, BigInt(r->second - r->first + 1)};
        unit = std::min({unit, run.first.is_zero() ? unit : run.first.exponent(), run.step.exponent()});
        runs.push_back(std::move(run));
    }
    for (const Dyadic* v : {&c.a, &E2, &c.aI, &c.bI})
        if (!v->is_zero())
            unit = std::min(unit, v->exponent());

    auto to_cells = [&](const Dyadic& v) -> std::int64_t {
        BigInt n = v.scaled(-unit).to_integer();
        if (!n.fits_slong_p())
            throw BudgetExceeded("grid coordinate out of range");
        return n.get_si();
    };
    std::int64_t cells = to_cells(J.scaled(1));
    if (cells > budget)
        throw BudgetExceeded("escape grid needs " + std::to_string(cells) + " cells");
    std::int64_t ncomp = pow2_int(level(i)).get_si();
    std::int64_t period = to_cells(E2);
    std::int64_t width = to_cells(E3);
    std::int64_t marks = 0;
    std::vector<std::uint8_t> grid(static_cast<std::size_t>(cells), 0);
    for (const auto& run : runs) {
        // coordinate of component 0 of U - λ, shifted so that -j maps to 0
        std::int64_t base = to_cells(c.a - run.first + J);
        std::int64_t step = to_cells(run.step);
        std::int64_t n = run.count.get_si();
        marks += n * ncomp;
        if (marks > budget)
            throw BudgetExceeded("escape brute force exceeds " + std::to_string(budget) + " marks");
        for (std::int64_t t = 0; t < n; ++t, base -= step) {
            for (std::int64_t m = 0; m < ncomp; ++m) {
                std::int64_t lo = base + m * period;
                std::int64_t hi = lo + width;
                if (hi <= 0)
                    continue;
                if (lo >= cells)
                    break;
                for (std::int64_t x = std::max<std::int64_t>(lo, 0); x < std::min(hi, cells); ++x)
                    grid[static_cast<std::size_t>(x)] = 1;
            }
        }
    }
    std::int64_t ilo = std::max<std::int64_t>(to_cells(c.aI + J), 0);
    std::int64_t ihi = std::min(to_cells(c.bI + J), cells);
    for (std::int64_t x = ilo; x < ihi; ++x)
        grid[static_cast<std::size_t>(x)] = 0;
    std::int64_t hits = std::count(grid.begin(), grid.end(), std::uint8_t{1});
    Dyadic measure = Dyadic(hits).scaled(unit);

    auto terms = escape_terms(i);
    EscapeResult res{measure, escape_symbolic(i)};
    WitnessReport r = make_report("universal.escape.measure", measure, terms.total(), measure <= terms.total());
    r.with("index", i.str()).with("bound", escape_bound(i).str()).with("grid_cells", std::to_string(cells));
    res.reports.push_back(std::move(r));
    return res;
}

struct BorelCantelli {
    Dyadic partial;
    Dyadic tail; // majorant of the terms beyond jmax
};

/// (8j^2 + 6j) 2^(-2j*2^j + j)
inline Dyadic borel_cantelli_term(std::int64_t j)
{
    return Dyadic(8 * j * j + 6 * j).scaled(-row_length(j) + j);
}

/// Partial sum through jmax and the tail majorant 2 * term(jmax + 1); the
/// term ratio is below 1/2 for every j >= 1.
inline BorelCantelli borel_cantelli_partial(std::int64_t jmax)
{
    if (jmax < 1)
        throw InvalidArgument("borel_cantelli_partial needs jmax >= 1");
    Dyadic sum;
    for (std::int64_t j = 1; j <= jmax; ++j)
        sum += borel_cantelli_term(j);
    return {sum, borel_cantelli_term(jmax + 1).scaled(1)};
}

struct SmoothResult {
    PiecewiseLinear g;
    Dyadic delta;
    std::vector<WitnessReport> reports;
};

/// Cap on U components for smoothing; each becomes four breakpoints.
inline constexpr std::int64_t smooth_component_budget = std::int64_t{1} << 16;

/// Continuous g with g = 1 on every U component, linear ramps of width δ on
/// both sides, and 0 elsewhere. For each N <= Nmax the added support inside
/// [N-1, N] is compared against 2^-N / 2^ceil(log2 L_N), L_N = #{λ <= 10N}.
inline SmoothResult smooth_indicator(const std::vector<UEntry>& uG, const GapBlockSeq& seq, std::int64_t Nmax)
{
    if (Nmax < 1)
        throw InvalidArgument("smooth_indicator needs Nmax >= 1");
    if (uG.empty())
        return {PiecewiseLinear(), Dyadic(), {}};
    BigInt components = 0;
    for (const auto& u : uG)
        components += u.set.count;
    if (components > smooth_component_budget)
        throw GuardExceeded("smoothing " + components.get_str() + " components exceeds the budget");

    auto L = [&](std::int64_t N) {
        Dyadic reach(10 * N);
        if (seq.last() < reach)
            throw PrefixTooShort("L_" + std::to_string(N) + " needs the sequence to reach " + reach.str());
        return seq.count_upto(reach);
    };
    std::int64_t lg = ceil_log2(L(Nmax));
    Dyadic delta = Dyadic::pow2(-Nmax - lg - ceil_log2(BigInt(2 * components)) - 1);

    std::vector<UEntry> sorted = uG;
    std::sort(sorted.begin(), sorted.end(), [](const UEntry& x, const UEntry& y) { return x.set.base < y.set.base; });
    std::vector<PiecewiseLinear> tents;
    std::map<std::int64_t, Dyadic> added; // strip N -> measure of ramps inside [N-1, N]
    auto add_ramp = [&](const Dyadic& lo, const Dyadic& hi) {
        for (BigInt n = lo.floor() + 1; Dyadic(n) - 1 < hi; ++n) {
            if (!n.fits_slong_p() || n.get_si() > Nmax)
                throw InvalidArgument("smoothed support reaches beyond Nmax = " + std::to_string(Nmax));
            auto part = DyInterval::closed(lo, hi).intersect(DyInterval::closed(Dyadic(n) - 1, Dyadic(n)));
            if (part)
                added[n.get_si()] += part->measure();
        }
    };
    for (const auto& u : sorted) {
        if (!(delta.scaled(1) < u.set.period - u.set.width))
            throw InvalidArgument("ramps would overlap neighbouring components");
        for (BigInt m = 0; m < u.set.count; ++m) {
            auto comp = u.set.component(m);
            tents.push_back(PiecewiseLinear::tent(comp.lo(), comp.hi(), Dyadic(1), delta));
            add_ramp(comp.lo() - delta, comp.lo());
            add_ramp(comp.hi(), comp.hi() + delta);
        }
    }
    SmoothResult res{PiecewiseLinear::concat(tents), delta, {}};
    for (const auto& [N, m] : added) {
        Dyadic bound = Dyadic::pow2(-N - ceil_log2(L(N)));
        WitnessReport r = make_report("universal.smooth.strip", m, bound, m < bound);
        r.with("N", std::to_string(N)).with("L_N", L(N).get_str()).with("delta", delta.str());
        res.reports.push_back(std::move(r));
    }
    return res;
}

} // namespace dyadlab::universal
