#pragma once

// JSON forms of the core types. Scalars are always `m*2^e` strings so files
// round-trip bit for bit.

#include <string>
#include <vector>

#include <json.hpp>

#include "dyadlab/dyadic.hpp"
#include "dyadlab/gap_sequence.hpp"
#include "dyadlab/interval.hpp"
#include "dyadlab/piecewise_linear.hpp"
#include "dyadlab/witness.hpp"

namespace dyadlab::io {

using Json = nlohmann::json;

inline Json to_json(const Dyadic& d) { return d.str(); }

inline Dyadic dyadic_from_json(const Json& j)
{
    if (!j.is_string())
        throw ParseError("expected a dyadic string, got " + j.dump());
    return Dyadic::parse(j.get<std::string>());
}

inline Json to_json(const IntervalUnion& u) { return u.to_strings(); }

inline IntervalUnion union_from_json(const Json& j)
{
    if (!j.is_array())
        throw ParseError("interval union must be a JSON array of strings");
    std::vector<std::string> items;
    for (const auto& e : j) {
        if (!e.is_string())
            throw ParseError("interval union entries must be strings");
        items.push_back(e.get<std::string>());
    }
    return IntervalUnion::from_strings(items);
}

/// [[x, value], ...]
inline Json to_json(const PiecewiseLinear& f)
{
    Json out = Json::array();
    for (const auto& p : f.breakpoints())
        out.push_back(Json::array({p.x.str(), p.value.str()}));
    return out;
}

inline PiecewiseLinear pl_from_json(const Json& j)
{
    if (!j.is_array())
        throw ParseError("piecewise-linear function must be a JSON array");
    std::vector<Breakpoint> pts;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2)
            throw ParseError("breakpoint must be a pair [x, value]");
        pts.push_back({dyadic_from_json(e[0]), dyadic_from_json(e[1])});
    }
    return PiecewiseLinear(std::move(pts));
}

inline Json to_json(const lattice::GapBlockSeq& seq)
{
    Json blocks = Json::array();
    for (const auto& b : seq.blocks())
        blocks.push_back({{"gap", b.gap.str()}, {"count", b.count.get_str()}, {"tag", b.tag}});
    return {{"origin", seq.origin().str()}, {"blocks", std::move(blocks)}};
}

inline lattice::GapBlockSeq seq_from_json(const Json& j)
{
    if (!j.is_object() || !j.contains("origin") || !j.contains("blocks"))
        throw ParseError("gap block sequence needs 'origin' and 'blocks'");
    lattice::GapBlockSeq seq(dyadic_from_json(j.at("origin")));
    for (const auto& b : j.at("blocks")) {
        const Json& count = b.at("count");
        BigInt n = count.is_string() ? detail::parse_integer(count.get<std::string>())
                                     : BigInt(count.get<long>());
        seq.append({dyadic_from_json(b.at("gap")), n, b.value("tag", std::string())});
    }
    return seq;
}

inline Json to_json(const WitnessReport& r)
{
    Json params = Json::object();
    for (const auto& [k, v] : r.params)
        params[k] = v;
    return {{"claim", r.claim}, {"params", std::move(params)}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"pass", r.pass}};
}

inline WitnessReport report_from_json(const Json& j)
{
    WitnessReport r;
    r.claim = j.at("claim").get<std::string>();
    for (const auto& [k, v] : j.at("params").items())
        r.params[k] = v.get<std::string>();
    r.lhs = j.at("lhs").get<std::string>();
    r.rhs = j.at("rhs").get<std::string>();
    r.pass = j.at("pass").get<bool>();
    return r;
}

/// Sorted report list; the caller's vector is left untouched.
inline Json to_json(std::vector<WitnessReport> reports)
{
    sort_reports(reports);
    Json out = Json::array();
    for (const auto& r : reports)
        out.push_back(to_json(r));
    return out;
}

} // namespace dyadlab::io
