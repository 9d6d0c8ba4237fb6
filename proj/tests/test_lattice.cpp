#include <random>

#include <gtest/gtest.h>

#include "dyadlab/dyadlab.hpp"
#include "oracle.hpp"

using namespace dyadlab;
using namespace dyadlab::lattice;
using oracle::q;

namespace {

GapBlockSeq universal_11()
{
    GapBlockSeq seq(Dyadic(15));
    seq.append({Dyadic::pow2(-8) - Dyadic::pow2(-12), BigInt(160), "fine"});
    seq.append({Dyadic::pow2(-9), BigInt(8148), "bridge"});
    return seq;
}

BigInt brute_floor_sum(long n, long m, long a, long b)
{
    BigInt total = 0;
    for (long i = 0; i < n; ++i) {
        BigInt num = BigInt(a) * i + b;
        BigInt fl;
        mpz_fdiv_q(fl.get_mpz_t(), num.get_mpz_t(), BigInt(m).get_mpz_t());
        total += fl;
    }
    return total;
}

} // namespace

TEST(FloorSum, MatchesBruteForce)
{
    std::mt19937_64 rng(1);
    for (int t = 0; t < 5000; ++t) {
        long n = static_cast<long>(rng() % 60);
        long m = 1 + static_cast<long>(rng() % 40);
        long a = static_cast<long>(rng() % 200) - 100;
        long b = static_cast<long>(rng() % 400) - 200;
        ASSERT_EQ(floor_sum(n, m, a, b), brute_floor_sum(n, m, a, b)) << n << " " << m << " " << a << " " << b;
    }
}

TEST(FloorSum, HugeArgumentsStayFast)
{
    BigInt n = pow2_int(400);
    BigInt m = pow2_int(300) + 1;
    BigInt a = pow2_int(299) + 7;
    BigInt s = floor_sum(n, m, a, 0);
    EXPECT_GT(s, 0);
}

TEST(GapBlockSeq, ValueAt)
{
    auto seq = universal_11();
    EXPECT_EQ(seq.value_at(0), Dyadic(15));
    EXPECT_EQ(seq.value_at(160), Dyadic(15) + Dyadic(75, -7));
    EXPECT_EQ(seq.value_at(8308), Dyadic(63, -1));
    EXPECT_EQ(seq.size(), 8309);
    EXPECT_THROW(seq.value_at(8309), IndexOutOfRange);
    EXPECT_THROW(seq.value_at(-1), IndexOutOfRange);
}

TEST(GapBlockSeq, CountUpto)
{
    auto seq = universal_11();
    EXPECT_EQ(seq.count_upto(Dyadic(15)), 1);
    EXPECT_EQ(seq.count_upto(Dyadic(14)), 0);
    EXPECT_EQ(seq.count_upto(Dyadic(16)), 373);
    EXPECT_EQ(seq.count_upto(Dyadic(100)), 8309);
    EXPECT_EQ(seq.count_below(Dyadic(15)), 0);

    // enumeration oracle over the first 400 points
    std::int64_t below16 = 0;
    for (int n = 0; n < 400; ++n)
        if (seq.value_at(n) <= Dyadic(16))
            ++below16;
    EXPECT_EQ(below16, 373);
}

TEST(GapBlockSeqProperty, GaloisAdjunction)
{
    auto seq = universal_11();
    std::mt19937_64 rng(2);
    for (int t = 0; t < 3000; ++t) {
        Dyadic x = Dyadic(14) + Dyadic(BigInt(static_cast<long>(rng() % (18 << 16))), -16);
        BigInt c = seq.count_upto(x);
        if (c >= 1) {
            ASSERT_LE(seq.value_at(c - 1), x);
        }
        if (c <= seq.total_gaps()) {
            ASSERT_LT(x, seq.value_at(c));
        }
    }
}

TEST(GapBlockSeq, MonotoneCheck)
{
    EXPECT_TRUE(seq_check_monotone_gaps(universal_11()).pass);
    GapBlockSeq single(Dyadic(0), {{Dyadic(1), BigInt(5), "a"}});
    EXPECT_TRUE(seq_check_monotone_gaps(single).pass);
    GapBlockSeq bad(Dyadic(0), {{Dyadic(1), BigInt(1), "a"}, {Dyadic(2), BigInt(1), "b"}});
    auto r = seq_check_monotone_gaps(bad);
    EXPECT_FALSE(r.pass);
    EXPECT_EQ(r.params.at("gap_index"), "1");
}

TEST(GapBlockSeq, PrefixAndProgressions)
{
    auto seq = universal_11();
    auto p = seq.prefix(200);
    EXPECT_EQ(p.total_gaps(), 200);
    EXPECT_EQ(p.last(), seq.value_at(200));
    auto progs = seq.progressions();
    BigInt points = 0;
    for (const auto& pr : progs)
        points += pr.count;
    EXPECT_EQ(points, seq.size());
    EXPECT_EQ(progs.front().start, Dyadic(15));
}

TEST(Counting, ApInInterval)
{
    Dyadic start(15);
    Dyadic step = Dyadic(15) * Dyadic::pow2(-12);
    auto iv = DyInterval::closed(Dyadic(15) + Dyadic::pow2(-2), Dyadic(15) + Dyadic(5, -4));
    EXPECT_EQ(count_ap_in_interval(start, step, 161, iv), 17);
    auto r = ap_index_range(start, step, 161, iv);
    ASSERT_TRUE(r);
    EXPECT_EQ(r->first, 69);
    EXPECT_EQ(r->second, 85);
    EXPECT_EQ(count_ap_in_interval(start, step, 161, DyInterval::closed(0, 1)), 0);
    EXPECT_EQ(count_ap_in_interval(start, step, 161, DyInterval::point(start)), 1);
}

TEST(Counting, ApInPeriodicExamples)
{
    PeriodicIntervalSet ps{Dyadic(0), Dyadic(8), Dyadic(2), BigInt(3)};
    EXPECT_EQ(count_ap_in_periodic(Dyadic(0), Dyadic(3), 8, ps), 3);

    PeriodicIntervalSet full{Dyadic(5), Dyadic(8), Dyadic(7), BigInt(4)};
    EXPECT_EQ(count_ap_in_periodic(Dyadic(5), Dyadic(1), 32, full), 32);
}

TEST(Counting, ShiftedUniversalBlockAgainstEnumeration)
{
    auto seq = universal_11();
    Dyadic x(3, -2);
    Dyadic a(16);
    Dyadic E = Dyadic::pow2(-4);
    PeriodicIntervalSet u{a, E * E, E * E * E, BigInt(16)};
    Dyadic step = seq.blocks()[0].gap;
    BigInt got = count_ap_in_periodic(x + seq.value_at(69), step, 92, u);
    std::int64_t want = oracle::count_periodic(q(x + seq.value_at(69)), q(step), 92, q(a), q(E * E), q(E * E * E), 16,
                                               true, true);
    EXPECT_EQ(got, want);
}

TEST(CountingProperty, PeriodicMatchesEnumeration)
{
    std::mt19937_64 rng(4);
    for (int t = 0; t < 10000; ++t) {
        int e = static_cast<int>(rng() % 7) - 3;
        Dyadic step(BigInt(1 + static_cast<long>(rng() % 13)), e);
        Dyadic period(BigInt(2 + static_cast<long>(rng() % 40)), e);
        Dyadic width(BigInt(static_cast<long>(rng() % 40)), e);
        if (!(width < period))
            width = period - Dyadic(1, e);
        bool lc = width.is_zero() || (rng() & 1);
        bool hc = width.is_zero() || (rng() & 1);
        PeriodicIntervalSet ps{Dyadic(BigInt(static_cast<long>(rng() % 100)) - 50, e), period, width,
                               BigInt(1 + static_cast<long>(rng() % 20)), lc, hc};
        Dyadic start(BigInt(static_cast<long>(rng() % 200)) - 100, e - 1);
        long count = 1 + static_cast<long>(rng() % 300);
        BigInt got = count_ap_in_periodic(start, step, count, ps);
        std::int64_t want = oracle::count_periodic(q(start), q(step), count, q(ps.base), q(ps.period), q(ps.width),
                                                   ps.count.get_si(), lc, hc);
        ASSERT_EQ(got, want) << "trial " << t;

        if (t % 10 == 0) {
            BigInt by_parts = 0;
            for (BigInt i = 0; i < ps.count; ++i)
                by_parts += count_ap_in_interval(start, step, count, ps.component(i));
            ASSERT_EQ(got, by_parts);
        }
        if (t % 10 == 1) {
            int sh = static_cast<int>(rng() % 40) - 20;
            PeriodicIntervalSet scaled{ps.base.scaled(sh), ps.period.scaled(sh), ps.width.scaled(sh), ps.count, lc, hc};
            ASSERT_EQ(count_ap_in_periodic(start.scaled(sh), step.scaled(sh), count, scaled), got);
        }
    }
}

TEST(SumPl, Examples)
{
    auto ramp = PiecewiseLinear({{Dyadic(39, -2), 0}, {Dyadic(10), Dyadic::pow2(-4)}, {Dyadic(11), Dyadic::pow2(-4)},
                                 {Dyadic(45, -2), 0}});
    EXPECT_EQ(sum_pl_over_ap(ramp, Dyadic::parse("9.8125"), Dyadic::pow2(-4), 3), Dyadic(6, -6));
    EXPECT_EQ(sum_pl_over_ap(ramp, Dyadic(0), Dyadic(1), 5), Dyadic(0));
    EXPECT_EQ(sum_pl_over_ap(ramp, Dyadic::parse("9.8125"), Dyadic(1), 1), Dyadic::pow2(-6));
}

TEST(SumPlProperty, MatchesTermwiseSum)
{
    std::mt19937_64 rng(6);
    for (int t = 0; t < 10000; ++t) {
        std::vector<Breakpoint> pts;
        Dyadic x(BigInt(static_cast<long>(rng() % 16)) - 8, -2);
        pts.push_back({x, 0});
        int pieces = 1 + static_cast<int>(rng() % 4);
        for (int i = 0; i < pieces; ++i) {
            x += Dyadic::pow2(static_cast<std::int64_t>(rng() % 5) - 2);
            pts.push_back({x, Dyadic(BigInt(static_cast<long>(rng() % 9)), -3)});
        }
        x += Dyadic::pow2(static_cast<std::int64_t>(rng() % 5) - 2);
        pts.push_back({x, 0});
        PiecewiseLinear f(pts);
        Dyadic step(BigInt(1 + static_cast<long>(rng() % 7)), -6 - static_cast<int>(rng() % 3));
        Dyadic start(BigInt(static_cast<long>(rng() % 4096)) - 2048, -8);
        long count = 1 + static_cast<long>(rng() % 2000);
        mpq_class want = 0;
        for (long k = 0; k < count; ++k)
            want += oracle::pl_eval(f, q(start) + q(step) * k);
        ASSERT_EQ(q(sum_pl_over_ap(f, start, step, count)), want) << "trial " << t;
    }
}

TEST(MergeSegments, FinestLatticeWins)
{
    std::vector<LatticeSegment> segs{
        {Dyadic::pow2(-2), DyInterval::closed_open(0, 8), "L1"},
        {Dyadic::pow2(-4), DyInterval::closed_open(8, 10), "L2"},
    };
    auto seq = merge_lattice_segments(segs);
    EXPECT_EQ(seq.origin(), Dyadic(0));
    EXPECT_EQ(seq.size(), 32 + 32);
    EXPECT_EQ(seq.last(), Dyadic(10) - Dyadic::pow2(-4));
    EXPECT_TRUE(seq_check_monotone_gaps(seq).pass);
    for (BigInt n = 1; n < seq.size(); ++n)
        ASSERT_GT(seq.value_at(n), seq.value_at(n - 1));
}

TEST(MergeSegments, OverlapHasNoDuplicates)
{
    std::vector<LatticeSegment> segs{
        {Dyadic(1), DyInterval::closed(0, 10), "coarse"},
        {Dyadic::pow2(-1), DyInterval::open_closed(4, 6), "fine"},
    };
    auto seq = merge_lattice_segments(segs);
    // 0..10 step 1 gives 11 points, plus 4.5, 5.5 inside (4,6]
    EXPECT_EQ(seq.size(), 13);
    EXPECT_FALSE(seq_check_monotone_gaps(seq).pass);
    EXPECT_EQ(seq.count_upto(Dyadic(5)), 7);
}

TEST(MaxGap, WithinWindow)
{
    std::vector<LatticeSegment> segs{
        {Dyadic(1), DyInterval::closed(0, 10), "coarse"},
        {Dyadic::pow2(-3), DyInterval::closed(4, 6), "fine"},
    };
    auto seq = merge_lattice_segments(segs);
    EXPECT_EQ(max_gap_within(seq, Dyadic(4), Dyadic(6)).value(), Dyadic::pow2(-3));
    EXPECT_EQ(max_gap_within(seq, Dyadic(3), Dyadic(6)).value(), Dyadic(1));
}

TEST(Json, RoundTrip)
{
    auto seq = universal_11();
    auto j = io::to_json(seq);
    EXPECT_EQ(io::seq_from_json(j), seq);
    EXPECT_EQ(io::to_json(io::seq_from_json(j)).dump(), j.dump());

    auto u = IntervalUnion::from_strings({"(0,2)", "[3,4]"});
    EXPECT_EQ(io::union_from_json(io::to_json(u)), u);

    auto f = PiecewiseLinear::tent(Dyadic(0), Dyadic(1), Dyadic(1, -1), Dyadic(1, -3));
    EXPECT_EQ(io::to_json(io::pl_from_json(io::to_json(f))).dump(), io::to_json(f).dump());

    WitnessReport r = make_report("c", Dyadic(1), Dyadic(2), true).with("k", "v");
    auto back = io::report_from_json(io::to_json(r));
    EXPECT_EQ(back.claim, "c");
    EXPECT_EQ(back.params.at("k"), "v");
    EXPECT_EQ(back.lhs, r.lhs);
    EXPECT_THROW(io::seq_from_json(io::Json::parse("{\"origin\": 1}")), ParseError);
}
