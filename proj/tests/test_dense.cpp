#include <random>

#include <gtest/gtest.h>

#include "dyadlab/dyadlab.hpp"
#include "oracle.hpp"

using namespace dyadlab;
using namespace dyadlab::dense;
using oracle::q;

namespace {

const std::vector<EnumeratedInterval>& enum12()
{
    static const auto e = enum_intervals(14);
    return e;
}

mpq_class termwise(const PiecewiseLinear& f, const Progression& p, const mpq_class& x)
{
    mpq_class total = 0;
    for (BigInt k = 0; k < p.count; ++k)
        total += oracle::pl_eval(f, x + q(p.start) + q(p.step) * mpq_class(k));
    return total;
}

} // namespace

TEST(Enumeration, OpeningOrder)
{
    const auto& e = enum12();
    EXPECT_EQ(e[0].iv.str(), DyInterval::closed(-1, 0).str());
    EXPECT_EQ(e[1].iv.str(), DyInterval::closed(0, 1).str());
    for (int j = 3; j <= 6; ++j)
        EXPECT_EQ(e[j - 1].level, 1) << j;
    EXPECT_EQ(e[2].iv.str(), DyInterval::closed(Dyadic(-1), Dyadic(-1, -1)).str());
}

TEST(Enumeration, GuardHoldsAndNoRepeats)
{
    auto e = enum_intervals(200);
    std::set<std::string> seen;
    for (const auto& it : e) {
        EXPECT_GE(it.iv.lo(), Dyadic(-it.j));
        EXPECT_LE(it.iv.hi(), Dyadic(it.j));
        EXPECT_LE(pow2_int(it.level), it.j);
        EXPECT_EQ(it.iv.hi() - it.iv.lo(), Dyadic::pow2(-it.level));
        EXPECT_TRUE(seen.insert(it.iv.str()).second) << it.iv.str();
    }
    // every level-2 interval inside [-2, 2] has appeared by j = 200
    for (long k = -7; k <= 8; ++k)
        EXPECT_TRUE(seen.count(DyInterval::closed(Dyadic(k - 1, -2), Dyadic(k, -2)).str())) << k;
}

TEST(Tent, PlateauAndSupport)
{
    auto f1 = tent_f(1);
    EXPECT_EQ(pl_eval(f1, Dyadic(2) + Dyadic::pow2(-5)), Dyadic(1, -1));
    EXPECT_EQ(pl_eval(f1, Dyadic(0)), Dyadic(0));
    EXPECT_EQ(u_hi(1), Dyadic(9, -2));
    EXPECT_EQ(f1.max_value(), Dyadic(1, -1));
    EXPECT_EQ(tent_f(5).max_value(), Dyadic::pow2(-5));
    EXPECT_FALSE(tent_support(1).contains(u_lo(1) - ramp_width(1)));
    EXPECT_TRUE(tent_support(1).contains(u_lo(1)));
}

TEST(Tripled, ClosedSameCentre)
{
    auto t = tripled(DyInterval::closed(Dyadic(1, -1), Dyadic(1)));
    EXPECT_EQ(t.lo(), Dyadic(0));
    EXPECT_EQ(t.hi(), Dyadic(3, -1));
    EXPECT_TRUE(t.lo_closed() && t.hi_closed());
}

TEST(Lower, HandValueAtOne)
{
    auto r = lower_bound_check(enum12()[0], Dyadic(-1, -1));
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.lhs, Dyadic(3, -1).str());
    EXPECT_THROW(lower_bound_check(enum12()[0], Dyadic(1)), OutOfInterval);
}

TEST(Lower, AllJThroughTwelve)
{
    Rng rng(31);
    for (const auto& e : enum12()) {
        if (e.j > 12)
            break;
        for (int s = 0; s < 10; ++s) {
            auto r = lower_bound_check(e, sample_dyadic(rng, e.iv));
            EXPECT_TRUE(r.pass) << e.j << " " << r.params.at("x");
        }
        EXPECT_TRUE(lower_bound_check(e, e.iv.lo()).pass);
        EXPECT_TRUE(lower_bound_check(e, e.iv.hi()).pass);
    }
}

TEST(Lower, MatchesTermwiseSumForSmallJ)
{
    Rng rng(32);
    for (const auto& e : enum12()) {
        if (e.j > 3)
            break;
        Progression p = lambda1(e.j, e.iv);
        for (int s = 0; s < 5; ++s) {
            Dyadic x = sample_dyadic(rng, DyInterval::closed(Dyadic(-e.j), Dyadic(e.j)), 10);
            EXPECT_EQ(q(sum_over(tent_f(e.j), p, x)), termwise(tent_f(e.j), p, q(x))) << e.j << " " << x.str();
        }
    }
}

TEST(Outside, ZeroAwayFromTripled)
{
    Rng rng(33);
    EXPECT_TRUE(outside_region(enum12()[0]).empty());
    for (const auto& e : enum12()) {
        if (e.j > 12)
            break;
        auto region = outside_region(e);
        for (int s = 0; s < 10 && !region.empty(); ++s) {
            Dyadic x = sample_dyadic(rng, region[s % region.size()]);
            auto r = outside_zero_check(e, x);
            EXPECT_TRUE(r.pass) << e.j << " " << x.str();
        }
    }
    EXPECT_THROW(outside_zero_check(enum12()[0], Dyadic(5, -3)), OutOfInterval);
}

TEST(Cross, VanishesForLargeJ0)
{
    Rng rng(34);
    for (std::int64_t j0 = 10; j0 <= 12; ++j0)
        for (const auto& e : enum12()) {
            if (e.j == j0 || e.j > 12)
                continue;
            for (int s = 0; s < 3; ++s) {
                Dyadic x = sample_dyadic(rng, DyInterval::closed(Dyadic(-j0), Dyadic(j0)));
                auto r = cross_term_zero_check(j0, e, x);
                EXPECT_TRUE(r.pass) << j0 << " " << e.j;
                EXPECT_FALSE(r.report_only());
            }
        }
    EXPECT_TRUE(cross_term_zero_check(2, enum12()[0], Dyadic(0)).report_only());
}

TEST(Density, GapBoundAndIncrease)
{
    auto enumd = enum_intervals(14);
    auto merged = lambda_prefix(enumd, 14, true, true);
    ASSERT_TRUE(merged);
    for (std::int64_t j = 10; j <= 14; ++j) {
        auto r = density_check(*merged, j);
        EXPECT_TRUE(r.pass) << j << " " << r.lhs;
    }
    EXPECT_FALSE(lattice::seq_check_monotone_gaps(*merged).pass);
}

TEST(Lambda2, HitsAndTail)
{
    Rng rng(35);
    std::vector<Dyadic> xs{Dyadic(0), Dyadic(-12), Dyadic(12), Dyadic(7, -1)};
    for (int s = 0; s < 20; ++s)
        xs.push_back(sample_dyadic(rng, DyInterval::closed(Dyadic(-12), Dyadic(12))));
    for (const auto& x : xs) {
        auto r = lambda2_tail_check(x, 12);
        EXPECT_TRUE(r.pass) << x.str() << " " << r.lhs << " vs " << r.rhs;
        for (std::int64_t j = 10; j <= 12; ++j)
            if (abs(x) <= Dyadic(j)) {
                EXPECT_LE(lambda2_hit_count(j, x).first, 1) << j << " " << x.str();
            }
    }
}

TEST(Series, JGAndPartialSums)
{
    auto G = IntervalUnion::from_strings({"(-3,3)"});
    auto c = build_thm31(12, G);
    EXPECT_FALSE(c.JG.empty());
    EXPECT_EQ(c.JG.front(), 1);
    EXPECT_TRUE(lattice::seq_check_monotone_gaps(c.lambda).pass == false);
    // x in I_1 collects at least 1 from f_1 over Λ1_1
    Dyadic v = fG_sum_partial_31(Dyadic(-1, -1), G, 12, false);
    EXPECT_GE(v, Dyadic(1));
    EXPECT_GE(fG_sum_partial_31(Dyadic(-1, -1), G, 12, true), v);
    EXPECT_EQ(fG_sum_partial_31(Dyadic(0), IntervalUnion::from_strings({"(0,2)"}), 12, true), Dyadic(0));
}
