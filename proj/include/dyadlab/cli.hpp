#pragma once

// Command-line front end. `run` takes the argument list without the program
// name and returns the process exit status:
//   0 every assertable claim passed, 1 some claim failed, 2 usage error,
//   3 a check was skipped on a guard or budget limit.

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dyadlab/dense_divergence.hpp"
#include "dyadlab/dyadic.hpp"
#include "dyadlab/interior_gap.hpp"
#include "dyadlab/interval.hpp"
#include "dyadlab/json_io.hpp"
#include "dyadlab/sampling.hpp"
#include "dyadlab/universal.hpp"
#include "dyadlab/witness.hpp"

namespace dyadlab::cli {

enum Exit : int { ok = 0, failure = 1, usage = 2, skipped = 3 };

struct RunConfig {
    std::string construction;
    std::string suite;
    std::string limit = "2,0";
    std::int64_t jmax = 0;
    std::int64_t samples = 10;
    std::uint64_t seed = 1;
    std::string out;
    std::string report;
    std::string seq_path;
    std::string g_path;
    std::string g_text;
    std::string xc = "9/2";
    std::vector<std::string> xs;
    std::vector<std::string> limits;
    std::int64_t guard_bits = 0;
};

/// Reports plus the number of checks abandoned on a guard or budget limit.
struct SuiteResult {
    std::vector<WitnessReport> reports;
    std::int64_t skipped = 0;

    void skip(const std::string& claim, const std::string& where, const std::exception& e)
    {
        WitnessReport r{claim, {}, "", "", false};
        r.with("mode", "report-only").with("where", where).with("skipped", e.what());
        reports.push_back(std::move(r));
        ++skipped;
    }

    void fail(const std::string& claim, const std::string& where, const std::exception& e)
    {
        WitnessReport r{claim, {}, "", "", false};
        r.with("where", where).with("error", e.what());
        reports.push_back(std::move(r));
    }
};

namespace detail {

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InvalidArgument("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InvalidArgument("cannot write '" + path + "'");
    out << text;
}

inline io::Json parse_json(const std::string& text, const std::string& what)
{
    try {
        return io::Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(what + ": " + e.what());
    }
}

inline IntervalUnion load_G(const RunConfig& cfg)
{
    if (!cfg.g_path.empty())
        return io::union_from_json(parse_json(read_file(cfg.g_path), cfg.g_path));
    if (!cfg.g_text.empty())
        return IntervalUnion::from_strings({cfg.g_text});
    return IntervalUnion::from_strings({cfg.construction == "thm31" ? "(-3,3)" : "(0,2)"});
}

/// Dyadic from a command-line value; any parse failure is a usage error.
inline Dyadic parse_arg(const std::string& text, const std::string& name)
{
    try {
        return Dyadic::parse(text);
    } catch (const Error& e) {
        throw InvalidArgument(name + ": " + e.what());
    }
}

inline universal::IndexJK parse_limit(const std::string& s)
{
    auto i = universal::IndexJK::parse(s);
    universal::validate(i);
    return i;
}

inline std::int64_t require_jmax(const RunConfig& cfg, std::int64_t fallback)
{
    std::int64_t j = cfg.jmax > 0 ? cfg.jmax : fallback;
    if (j < 1)
        throw InvalidArgument("--jmax must be at least 1");
    return j;
}

inline std::string csv_field(std::string s)
{
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r' || c == '"')
            c = ' ';
    return s;
}

inline std::string seq_summary(const lattice::GapBlockSeq& seq)
{
    return "blocks=" + std::to_string(seq.blocks().size()) + " lambda_max=" + seq.last().str() +
           " points=" + seq.size().get_str();
}

/// Runs `body`, turning guard and budget errors into skips and every other
/// library error into a failed claim.
inline void guarded(SuiteResult& res, const std::string& claim, const std::string& where,
                    const std::function<void()>& body)
{
    try {
        body();
    } catch (const GuardExceeded& e) {
        res.skip(claim, where, e);
    } catch (const BudgetExceeded& e) {
        res.skip(claim, where, e);
    } catch (const PrefixTooShort& e) {
        res.skip(claim, where, e);
    } catch (const Error& e) {
        res.fail(claim, where, e);
    }
}

} // namespace detail

// ---- construct ----

inline int cmd_construct(const RunConfig& cfg, std::ostream& out)
{
    io::Json doc;
    if (cfg.construction == "universal") {
        auto seq = universal::build_universal(detail::parse_limit(cfg.limit));
        doc = io::to_json(seq);
        out << "universal limit=" << cfg.limit << " " << detail::seq_summary(seq) << "\n";
    } else if (cfg.construction == "thm31") {
        auto c = dense::build_thm31(detail::require_jmax(cfg, 12), detail::load_G(cfg));
        io::Json ivs = io::Json::array();
        for (const auto& e : c.intervals)
            ivs.push_back({{"j", e.j}, {"interval", e.iv.str()}});
        doc = {{"jmax", c.jmax},       {"G", io::to_json(c.G)}, {"intervals", ivs},
               {"JG", c.JG},           {"lambda", io::to_json(c.lambda)},
               {"fG", io::to_json(c.fG)}};
        out << "thm31 jmax=" << c.jmax << " " << detail::seq_summary(c.lambda) << " JG=" << c.JG.size() << "\n";
    } else if (cfg.construction == "thm33") {
        auto c = interior_gap::build_thm33(detail::require_jmax(cfg, 6));
        doc = {{"jmax", c.jmax}, {"lambda", io::to_json(c.seq)}, {"f", io::to_json(c.f)}};
        out << "thm33 jmax=" << c.jmax << " " << detail::seq_summary(c.seq) << "\n";
    } else {
        throw InvalidArgument("unknown construction '" + cfg.construction + "'");
    }
    std::string text = doc.dump(2) + "\n";
    if (cfg.out.empty())
        out << text;
    else
        detail::write_file(cfg.out, text);
    return ok;
}

// ---- verify: universal ----

inline lattice::GapBlockSeq universal_seq(const RunConfig& cfg)
{
    if (!cfg.seq_path.empty()) {
        auto doc = detail::parse_json(detail::read_file(cfg.seq_path), cfg.seq_path);
        return io::seq_from_json(doc.contains("lambda") ? doc.at("lambda") : doc);
    }
    return universal::build_universal(detail::parse_limit(cfg.limit));
}

inline SuiteResult verify_universal(const RunConfig& cfg)
{
    using namespace universal;
    SuiteResult res;
    Rng rng(cfg.seed);
    const std::string& suite = cfg.suite;

    if (suite == "lemma") {
        IndexJK limit = detail::parse_limit(cfg.limit);
        for (IndexJK i{1, 0}; i < limit; i = idx_successor(i))
            res.reports.push_back(check_lemma_useful(i));
        return res;
    }

    auto seq = universal_seq(cfg);
    auto steps = universal_steps(seq);

    if (suite == "gaps") {
        res.reports.push_back(lattice::seq_check_monotone_gaps(seq));
        detail::guarded(res, "universal.gaps", "step-bounds", [&] {
            for (auto& r : check_step_bounds(seq))
                res.reports.push_back(std::move(r));
        });
    } else if (suite == "integrality") {
        detail::guarded(res, "universal.integrality", "all", [&] {
            for (auto& r : check_integrality(seq))
                res.reports.push_back(std::move(r));
        });
    } else if (suite == "covering") {
        for (const auto& st : steps) {
            std::int64_t landed = 0;
            std::string first_error;
            DyInterval I = i_interval(st.index);
            bool abandoned = false;
            for (std::int64_t s = 0; s < cfg.samples && !abandoned; ++s) {
                Dyadic x = sample_dyadic(rng, I);
                try {
                    covering_witness(x, st.index, seq);
                    ++landed;
                } catch (const GuardExceeded& e) {
                    res.skip("universal.covering", st.index.str(), e);
                    abandoned = true;
                } catch (const Error& e) {
                    if (first_error.empty())
                        first_error = x.str() + ": " + e.what();
                }
            }
            if (abandoned)
                continue;
            WitnessReport r = make_report("universal.covering", BigInt(landed), BigInt(cfg.samples),
                                          landed == cfg.samples);
            r.with("index", st.index.str()).with("seed", std::to_string(cfg.seed));
            if (!first_error.empty())
                r.with("first_error", first_error);
            res.reports.push_back(std::move(r));
        }
    } else if (suite == "escape") {
        std::int64_t jtop = 1;
        for (const auto& st : steps) {
            jtop = std::max(jtop, st.index.j);
            if (st.index.j == 1) {
                detail::guarded(res, "universal.escape.measure", st.index.str(), [&] {
                    auto er = escape_measure_bruteforce(st.index, seq);
                    for (auto& r : er.reports)
                        res.reports.push_back(std::move(r));
                });
            } else {
                for (auto& r : escape_symbolic(st.index)) {
                    r.with("method", "symbolic");
                    res.reports.push_back(std::move(r));
                }
            }
        }
        Dyadic prev_total;
        for (std::int64_t j = 1; j <= jtop + 1; ++j) {
            auto bc = borel_cantelli_partial(j);
            Dyadic total = bc.partial + bc.tail;
            bool mono = j == 1 || total <= prev_total;
            WitnessReport r = make_report("universal.borel_cantelli", total, j == 1 ? Dyadic(2) : prev_total,
                                          mono && total < Dyadic(2));
            r.with("jmax", std::to_string(j)).with("partial", bc.partial.str()).with("tail", bc.tail.str());
            res.reports.push_back(std::move(r));
            prev_total = total;
        }
    } else if (suite == "series" || suite == "smooth") {
        if (steps.empty())
            throw InvalidArgument("the sequence has no construction steps");
        IntervalUnion G = detail::load_G(cfg);
        auto uG = build_uG(G, steps.back().index);
        if (suite == "smooth") {
            std::vector<UEntry> small;
            for (const auto& u : uG)
                if (u.index.j == 1)
                    small.push_back(u);
            if (small.empty())
                return res;
            Dyadic right;
            for (const auto& u : small)
                right = max(right, u.set.component(BigInt(u.set.count - 1)).hi());
            std::int64_t Nmax = right.floor().get_si() + 1;
            detail::guarded(res, "universal.smooth.strip", "uG", [&] {
                auto sm = smooth_indicator(small, seq, Nmax);
                for (auto& r : sm.reports)
                    res.reports.push_back(std::move(r));
            });
            return res;
        }
        for (const auto& u : uG) {
            auto st = find_step(seq, u.index);
            if (!st)
                continue;
            DyInterval I = i_interval(u.index);
            for (std::int64_t s = 0; s < cfg.samples; ++s) {
                Dyadic x = sample_dyadic(rng, I);
                detail::guarded(res, "universal.series", u.index.str(), [&] {
                    BigInt before = fG_partial_sum(x, uG, seq.prefix(st->n0));
                    BigInt after = fG_partial_sum(x, uG, seq.prefix(st->n1));
                    WitnessReport r = make_report("universal.series", BigInt(after - before), BigInt(1),
                                                  after - before >= 1);
                    r.with("index", u.index.str()).with("x", x.str());
                    res.reports.push_back(std::move(r));
                });
            }
        }
    } else {
        throw InvalidArgument("unknown universal suite '" + suite + "'");
    }
    return res;
}

// ---- verify: thm31 ----

inline SuiteResult verify_thm31(const RunConfig& cfg)
{
    using namespace dense;
    SuiteResult res;
    Rng rng(cfg.seed);
    std::int64_t jmax = detail::require_jmax(cfg, 12);
    auto enumd = enum_intervals(jmax);
    const std::string& suite = cfg.suite;

    if (suite == "lower") {
        for (const auto& e : enumd)
            for (std::int64_t s = 0; s < cfg.samples; ++s) {
                Dyadic x = sample_dyadic(rng, e.iv);
                detail::guarded(res, "thm31.lower", std::to_string(e.j),
                                [&] { res.reports.push_back(lower_bound_check(e, x)); });
            }
    } else if (suite == "outside") {
        for (const auto& e : enumd) {
            auto region = outside_region(e);
            if (region.empty()) {
                WitnessReport r{"thm31.outside.empty", {}, "0", "0", true};
                r.with("j", std::to_string(e.j)).with("mode", "report-only");
                res.reports.push_back(std::move(r));
                continue;
            }
            for (std::int64_t s = 0; s < cfg.samples; ++s) {
                const DyInterval& piece = region[static_cast<std::size_t>(s) % region.size()];
                Dyadic x = sample_dyadic(rng, piece);
                detail::guarded(res, "thm31.outside", std::to_string(e.j),
                                [&] { res.reports.push_back(outside_zero_check(e, x)); });
            }
        }
    } else if (suite == "cross") {
        for (std::int64_t j0 = 1; j0 <= jmax; ++j0)
            for (const auto& e : enumd) {
                if (e.j == j0)
                    continue;
                for (std::int64_t s = 0; s < cfg.samples; ++s) {
                    Dyadic x = sample_dyadic(rng, DyInterval::closed(Dyadic(-j0), Dyadic(j0)));
                    detail::guarded(res, "thm31.cross", std::to_string(j0),
                                    [&] { res.reports.push_back(cross_term_zero_check(j0, e, x)); });
                }
            }
    } else if (suite == "density") {
        auto merged = lambda_prefix(enumd, jmax, true, true);
        for (std::int64_t j = lambda2_first; j <= jmax; ++j)
            res.reports.push_back(density_check(*merged, j));
        auto mono = lattice::seq_check_monotone_gaps(*merged);
        WitnessReport r{"thm31.gap_increase", {}, mono.lhs, mono.rhs, !mono.pass};
        r.with("jmax", std::to_string(jmax));
        if (!mono.pass)
            r.with("block", mono.params.at("block"));
        res.reports.push_back(std::move(r));
    } else if (suite == "tail") {
        std::vector<Dyadic> xs{Dyadic(0)};
        for (std::int64_t s = 0; s < cfg.samples; ++s)
            xs.push_back(sample_dyadic(rng, DyInterval::closed(Dyadic(-jmax), Dyadic(jmax))));
        for (const auto& x : xs) {
            detail::guarded(res, "thm31.lambda2_tail", x.str(),
                            [&] { res.reports.push_back(lambda2_tail_check(x, jmax)); });
            for (std::int64_t j = lambda2_first; j <= jmax; ++j)
                if (abs(x) <= Dyadic(j))
                    res.reports.push_back(lambda2_hit_count(j, x).second);
        }
    } else {
        throw InvalidArgument("unknown thm31 suite '" + suite + "'");
    }
    return res;
}

// ---- verify: thm33 ----

inline SuiteResult verify_thm33(const RunConfig& cfg)
{
    using namespace interior_gap;
    SuiteResult res;
    Rng rng(cfg.seed);
    std::int64_t jmax = detail::require_jmax(cfg, 6);
    const std::string& suite = cfg.suite;

    if (suite == "gaps") {
        auto c = build_thm33(jmax);
        WitnessReport mono = lattice::seq_check_monotone_gaps(c.seq);
        mono.with("jmax", std::to_string(jmax));
        res.reports.push_back(std::move(mono));
        for (std::int64_t j = 1; j <= jmax; ++j) {
            Dyadic peak = decade_tent(j).max_value();
            WitnessReport r = make_report("thm33.f_peak", peak, height(j), peak == height(j) && c.f(Dyadic(10 * j)) == peak);
            r.with("j", std::to_string(j));
            res.reports.push_back(std::move(r));
        }
    } else if (suite == "diverge") {
        std::vector<Dyadic> xs{Dyadic(0), Dyadic(1, -1), Dyadic(1)};
        for (std::int64_t s = 0; s < cfg.samples; ++s)
            xs.push_back(sample_dyadic(rng, DyInterval::closed(0, 1)));
        for (const auto& x : xs) {
            Dyadic prev = divergence_partial(x, 1);
            for (std::int64_t j = 2; j <= jmax; ++j) {
                Dyadic cur = divergence_partial(x, j);
                Dyadic floor = decade_floor(j - 1);
                WitnessReport r = make_report("thm33.diverge.increment", cur - prev, floor, cur - prev >= floor);
                r.with("x", x.str()).with("jmax", std::to_string(j)).with("sum", cur.str());
                res.reports.push_back(std::move(r));
                prev = cur;
            }
        }
        Dyadic anchor = divergence_partial(Dyadic(0), 1);
        res.reports.push_back(make_report("thm33.diverge.anchor_x0", anchor, Dyadic(3, -5), anchor == Dyadic(3, -5)));
    } else if (suite == "converge") {
        std::vector<Dyadic> xs{Dyadic(4), Dyadic(5)};
        for (std::int64_t s = 0; s < cfg.samples; ++s)
            xs.push_back(sample_dyadic(rng, DyInterval::closed(4, 5)));
        for (const auto& x : xs)
            for (auto& r : convergence_tail_check(x, jmax))
                res.reports.push_back(std::move(r));
    } else if (suite == "probe") {
        res.reports.push_back(thm34_probe(detail::parse_arg(cfg.xc, "--xc"), jmax, cfg.samples, cfg.seed));
    } else {
        throw InvalidArgument("unknown thm33 suite '" + suite + "'");
    }
    return res;
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& out)
{
    SuiteResult res;
    if (cfg.construction == "universal")
        res = verify_universal(cfg);
    else if (cfg.construction == "thm31")
        res = verify_thm31(cfg);
    else if (cfg.construction == "thm33")
        res = verify_thm33(cfg);
    else
        throw InvalidArgument("unknown construction '" + cfg.construction + "'");

    std::int64_t failed = 0;
    for (const auto& r : res.reports)
        failed += r.failed() ? 1 : 0;
    std::string text = io::to_json(res.reports).dump(2) + "\n";
    if (!cfg.report.empty())
        detail::write_file(cfg.report, text);
    out << cfg.construction << " " << cfg.suite << ": claims=" << res.reports.size() << " failed=" << failed
        << " skipped=" << res.skipped << "\n";
    if (failed > 0)
        return failure;
    return res.skipped > 0 ? skipped : ok;
}

// ---- eval ----

inline int cmd_eval(const RunConfig& cfg, std::ostream& out)
{
    std::ostringstream csv;
    csv << "x,limit,sum_dyadic,sum_decimal,error\n";
    IntervalUnion G = detail::load_G(cfg);
    std::vector<std::string> limits = cfg.limits;
    if (limits.empty())
        limits.push_back(cfg.construction == "universal" ? cfg.limit : std::to_string(detail::require_jmax(cfg, 1)));

    for (const auto& xs : cfg.xs) {
        Dyadic x = detail::parse_arg(xs, "--x");
        for (const auto& lim : limits) {
            std::string label = lim;
            std::string dy;
            std::string dec;
            std::string err;
            try {
                Dyadic value;
                if (cfg.construction == "universal") {
                    auto i = detail::parse_limit(lim);
                    label = std::to_string(i.j) + ":" + std::to_string(i.k);
                    auto seq = universal::build_universal(i);
                    value = Dyadic(universal::fG_partial_sum(x, universal::build_uG(G, i), seq));
                } else if (cfg.construction == "thm31") {
                    value = dense::fG_sum_partial_31(x, G, dyadlab::detail::parse_integer(lim).get_si(), true);
                } else if (cfg.construction == "thm33") {
                    auto c = interior_gap::build_thm33(dyadlab::detail::parse_integer(lim).get_si());
                    value = interior_gap::series_sum(c.f, c.seq, x);
                } else {
                    throw InvalidArgument("unknown construction '" + cfg.construction + "'");
                }
                dy = value.str();
                dec = value.decimal().value_or("");
            } catch (const InvalidArgument&) {
                throw;
            } catch (const Error& e) {
                err = e.what();
            }
            csv << detail::csv_field(x.str()) << "," << detail::csv_field(label) << "," << dy << "," << dec << ","
                << detail::csv_field(err) << "\n";
        }
    }
    if (cfg.out.empty())
        out << csv.str();
    else
        detail::write_file(cfg.out, csv.str());
    return ok;
}

/// Parses `args` and dispatches. Library errors that reflect bad input map
/// to the usage code; guard and budget errors to the skip code.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"Exact constructions and checks for translate series"};
    app.require_subcommand(1);
    RunConfig cfg;
    std::vector<std::string> constructions{"universal", "thm31", "thm33"};

    auto common = [&](CLI::App* sub) {
        sub->add_option("construction", cfg.construction, "universal | thm31 | thm33")
            ->required()
            ->check(CLI::IsMember(constructions));
        sub->add_option("--limit", cfg.limit, "index j,k (universal)");
        sub->add_option("--jmax", cfg.jmax, "number of j values or decades");
        sub->add_option("--G", cfg.g_path, "JSON array of interval strings");
        sub->add_option("--G-interval", cfg.g_text, "a single interval such as (0,2)");
        sub->add_option("--guard-bits", cfg.guard_bits, "exponent-span guard in bits");
    };
    CLI::App* construct = app.add_subcommand("construct", "build a construction and write it as JSON");
    common(construct);
    construct->add_option("--out", cfg.out, "output file");

    CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
    common(verify);
    verify->add_option("--suite", cfg.suite, "suite name")->required();
    verify->add_option("--samples", cfg.samples, "sample points per item")->check(CLI::NonNegativeNumber);
    verify->add_option("--seed", cfg.seed, "random seed");
    verify->add_option("--report", cfg.report, "report JSON file");
    verify->add_option("--seq", cfg.seq_path, "load the sequence from a construct output");
    verify->add_option("--xc", cfg.xc, "probe start (thm33)");

    CLI::App* eval = app.add_subcommand("eval", "tabulate partial sums as CSV");
    common(eval);
    eval->add_option("--x", cfg.xs, "points");
    eval->add_option("--limits", cfg.limits, "prefix limits (j,k or jmax)");
    eval->add_option("--out", cfg.out, "CSV file");

    std::vector<std::string> argv_store;
    argv_store.reserve(args.size() + 1);
    argv_store.push_back("dyadlab");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_store)
        argv.push_back(s.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return ok;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return usage;
    }

    try {
        std::optional<ScopedSpanGuard> guard;
        if (cfg.guard_bits > 0)
            guard.emplace(cfg.guard_bits);
        if (construct->parsed())
            return cmd_construct(cfg, out);
        if (verify->parsed())
            return cmd_verify(cfg, out);
        return cmd_eval(cfg, out);
    } catch (const InvalidArgument& e) {
        err << "usage: " << e.what() << "\n";
        return usage;
    } catch (const ParseError& e) {
        err << "usage: " << e.what() << "\n";
        return usage;
    } catch (const GuardExceeded& e) {
        err << "skipped: " << e.what() << "\n";
        return skipped;
    } catch (const BudgetExceeded& e) {
        err << "skipped: " << e.what() << "\n";
        return skipped;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return failure;
    }
}

} // namespace dyadlab::cli
