#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "dyadlab/dyadic.hpp"

namespace dyadlab {

/// Outcome of one checked claim: exact values on both sides plus a verdict.
/// Reports tagged params["mode"] == "report-only" are informational and
/// never count as failures.
struct WitnessReport {
    std::string claim;
    std::map<std::string, std::string> params;
    std::string lhs;
    std::string rhs;
    bool pass = false;

    bool report_only() const
    {
        auto it = params.find("mode");
        return it != params.end() && it->second == "report-only";
    }

    bool failed() const { return !pass && !report_only(); }

    WitnessReport& with(std::string key, std::string value)
    {
        params[std::move(key)] = std::move(value);
        return *this;
    }

    friend bool operator==(const WitnessReport&, const WitnessReport&) = default;
};

inline WitnessReport make_report(std::string claim, const Dyadic& lhs, const Dyadic& rhs, bool pass)
{
    return {std::move(claim), {}, lhs.str(), rhs.str(), pass};
}

inline WitnessReport make_report(std::string claim, const BigInt& lhs, const BigInt& rhs, bool pass)
{
    return {std::move(claim), {}, lhs.get_str(), rhs.get_str(), pass};
}

/// Canonical order for writing: claim, then parameters, then sides.
inline void sort_reports(std::vector<WitnessReport>& reports)
{
    std::stable_sort(reports.begin(), reports.end(), [](const WitnessReport& a, const WitnessReport& b) {
        return std::tie(a.claim, a.params, a.lhs, a.rhs) < std::tie(b.claim, b.params, b.lhs, b.rhs);
    });
}

inline bool all_pass(const std::vector<WitnessReport>& reports)
{
    return std::none_of(reports.begin(), reports.end(), [](const WitnessReport& r) { return r.failed(); });
}

} // namespace dyadlab
