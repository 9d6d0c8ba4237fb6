#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "dyadlab/dyadic.hpp"
#include "dyadlab/interval.hpp"

namespace dyadlab {

struct Breakpoint {
    Dyadic x;
    Dyadic value;

    friend bool operator==(const Breakpoint&, const Breakpoint&) = default;
};

/// Compactly supported continuous function, linear between consecutive
/// breakpoints and zero outside their span. An empty breakpoint list is the
/// zero function.
class PiecewiseLinear {
public:
    PiecewiseLinear() = default;

    explicit PiecewiseLinear(std::vector<Breakpoint> pts) : pts_(std::move(pts))
    {
        if (pts_.empty())
            return;
        if (pts_.size() < 2)
            throw InvalidArgument("piecewise-linear function needs at least two breakpoints");
        for (std::size_t i = 0; i < pts_.size(); ++i) {
            if (pts_[i].value.sign() < 0)
                throw InvalidArgument("negative breakpoint value at " + pts_[i].x.str());
            if (i > 0 && !(pts_[i - 1].x < pts_[i].x))
                throw InvalidArgument("breakpoints not strictly increasing at " + pts_[i].x.str());
        }
        if (!pts_.front().value.is_zero() || !pts_.back().value.is_zero())
            throw InvalidArgument("first and last breakpoint values must be zero");
    }

    /// Plateau `height` on [lo, hi] with linear ramps of width `ramp` on both sides.
    static PiecewiseLinear tent(const Dyadic& lo, const Dyadic& hi, const Dyadic& height, const Dyadic& ramp)
    {
        if (lo == hi)
            return PiecewiseLinear({{lo - ramp, 0}, {lo, height}, {hi + ramp, 0}});
        return PiecewiseLinear({{lo - ramp, 0}, {lo, height}, {hi, height}, {hi + ramp, 0}});
    }

    /// Sum of functions whose supports are ordered left to right and overlap
    /// at most in a shared zero endpoint.
    static PiecewiseLinear concat(const std::vector<PiecewiseLinear>& parts)
    {
        std::vector<Breakpoint> pts;
        for (const auto& f : parts) {
            if (f.pts_.empty())
                continue;
            auto begin = f.pts_.begin();
            if (!pts.empty()) {
                if (begin->x < pts.back().x)
                    throw InvalidArgument("concat: supports overlap at " + begin->x.str());
                if (begin->x == pts.back().x)
                    ++begin;
            }
            pts.insert(pts.end(), begin, f.pts_.end());
        }
        return PiecewiseLinear(std::move(pts));
    }

    const std::vector<Breakpoint>& breakpoints() const { return pts_; }
    bool is_zero() const { return pts_.empty(); }

    /// Closed hull of the support; only meaningful when !is_zero().
    DyInterval support() const { return DyInterval::closed(pts_.front().x, pts_.back().x); }

    Dyadic max_value() const
    {
        Dyadic m;
        for (const auto& p : pts_)
            m = max(m, p.value);
        return m;
    }

    /// Exact value at x; NotExact if the interpolant there is not dyadic.
    Dyadic operator()(const Dyadic& x) const
    {
        if (pts_.empty() || x <= pts_.front().x || x >= pts_.back().x)
            return {};
        auto it = std::upper_bound(pts_.begin(), pts_.end(), x,
                                   [](const Dyadic& v, const Breakpoint& b) { return v < b.x; });
        const Breakpoint& right = *it;
        const Breakpoint& left = *std::prev(it);
        if (x == left.x)
            return left.value;
        if (left.value == right.value)
            return left.value;
        return left.value + div_exact((right.value - left.value) * (x - left.x), right.x - left.x);
    }

    friend bool operator==(const PiecewiseLinear&, const PiecewiseLinear&) = default;

private:
    std::vector<Breakpoint> pts_;
};

inline Dyadic pl_eval(const PiecewiseLinear& f, const Dyadic& x) { return f(x); }

} // namespace dyadlab
