#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dyadlab/dyadic.hpp"

namespace dyadlab {

/// Interval with dyadic endpoints and per-endpoint closedness.
/// A degenerate interval (lo == hi) must be closed on both sides.
class DyInterval {
public:
    DyInterval() = default;

    DyInterval(Dyadic lo, Dyadic hi, bool lo_closed = true, bool hi_closed = true)
        : lo_(std::move(lo)), hi_(std::move(hi)), lo_closed_(lo_closed), hi_closed_(hi_closed)
    {
        if (hi_ < lo_)
            throw InvalidArgument("interval with hi < lo: " + str());
        if (hi_ == lo_ && !(lo_closed_ && hi_closed_))
            throw InvalidArgument("empty degenerate interval: " + str());
    }

    static DyInterval closed(Dyadic lo, Dyadic hi) { return {std::move(lo), std::move(hi), true, true}; }
    static DyInterval open(Dyadic lo, Dyadic hi) { return {std::move(lo), std::move(hi), false, false}; }
    static DyInterval closed_open(Dyadic lo, Dyadic hi) { return {std::move(lo), std::move(hi), true, false}; }
    static DyInterval open_closed(Dyadic lo, Dyadic hi) { return {std::move(lo), std::move(hi), false, true}; }
    static DyInterval point(const Dyadic& x) { return {x, x, true, true}; }

    const Dyadic& lo() const { return lo_; }
    const Dyadic& hi() const { return hi_; }
    bool lo_closed() const { return lo_closed_; }
    bool hi_closed() const { return hi_closed_; }

    Dyadic measure() const { return hi_ - lo_; }

    bool contains(const Dyadic& x) const
    {
        bool above = lo_closed_ ? lo_ <= x : lo_ < x;
        bool below = hi_closed_ ? x <= hi_ : x < hi_;
        return above && below;
    }

    bool contains(const DyInterval& o) const
    {
        bool left = lo_ < o.lo_ || (lo_ == o.lo_ && (lo_closed_ || !o.lo_closed_));
        bool right = o.hi_ < hi_ || (o.hi_ == hi_ && (hi_closed_ || !o.hi_closed_));
        return left && right;
    }

    /// Intersection, or nullopt when empty.
    std::optional<DyInterval> intersect(const DyInterval& o) const
    {
        Dyadic lo = max(lo_, o.lo_);
        bool lc = lo_ == o.lo_ ? (lo_closed_ && o.lo_closed_) : (lo == lo_ ? lo_closed_ : o.lo_closed_);
        Dyadic hi = min(hi_, o.hi_);
        bool hc = hi_ == o.hi_ ? (hi_closed_ && o.hi_closed_) : (hi == hi_ ? hi_closed_ : o.hi_closed_);
        if (hi < lo || (hi == lo && !(lc && hc)))
            return std::nullopt;
        return DyInterval(lo, hi, lc, hc);
    }

    DyInterval shifted(const Dyadic& by) const { return {lo_ + by, hi_ + by, lo_closed_, hi_closed_}; }

    friend bool operator==(const DyInterval&, const DyInterval&) = default;

    std::string str() const
    {
        return std::string(lo_closed_ ? "[" : "(") + lo_.str() + "," + hi_.str() + (hi_closed_ ? "]" : ")");
    }

    static DyInterval parse(std::string_view text)
    {
        std::string_view s = detail::trim(text);
        if (s.size() < 5)
            throw ParseError("bad interval '" + std::string(text) + "'");
        char open_c = s.front();
        char close_c = s.back();
        if ((open_c != '[' && open_c != '(') || (close_c != ']' && close_c != ')'))
            throw ParseError("bad interval brackets in '" + std::string(text) + "'");
        std::string_view body = s.substr(1, s.size() - 2);
        auto comma = body.find(',');
        if (comma == std::string_view::npos)
            throw ParseError("interval needs 'lo,hi': '" + std::string(text) + "'");
        return {Dyadic::parse(body.substr(0, comma)), Dyadic::parse(body.substr(comma + 1)),
                open_c == '[', close_c == ']'};
    }

private:
    Dyadic lo_;
    Dyadic hi_;
    bool lo_closed_ = true;
    bool hi_closed_ = true;
};

/// Canonical finite union of intervals: sorted, pairwise disjoint, and no two
/// parts can be merged into one interval.
class IntervalUnion {
public:
    IntervalUnion() = default;

    static IntervalUnion from_intervals(std::vector<DyInterval> ivs)
    {
        std::sort(ivs.begin(), ivs.end(), starts_before);
        IntervalUnion out;
        for (auto& iv : ivs) {
            if (!out.parts_.empty() && mergeable(out.parts_.back(), iv))
                out.parts_.back() = hull(out.parts_.back(), iv);
            else
                out.parts_.push_back(std::move(iv));
        }
        return out;
    }

    /// New union with `iv` added; the receiver is unchanged.
    IntervalUnion inserted(const DyInterval& iv) const
    {
        std::vector<DyInterval> all = parts_;
        all.push_back(iv);
        return from_intervals(std::move(all));
    }

    const std::vector<DyInterval>& parts() const { return parts_; }
    bool empty() const { return parts_.empty(); }

    Dyadic measure() const
    {
        Dyadic total;
        for (const auto& p : parts_)
            total += p.measure();
        return total;
    }

    bool contains(const Dyadic& x) const
    {
        return std::any_of(parts_.begin(), parts_.end(), [&](const DyInterval& p) { return p.contains(x); });
    }

    /// True when `iv` lies inside a single part. Parts cannot be merged, so a
    /// connected subset of the union always lies in one part.
    bool contains(const DyInterval& iv) const
    {
        return std::any_of(parts_.begin(), parts_.end(), [&](const DyInterval& p) { return p.contains(iv); });
    }

    IntervalUnion intersect(const DyInterval& iv) const
    {
        IntervalUnion out;
        for (const auto& p : parts_)
            if (auto x = p.intersect(iv))
                out.parts_.push_back(std::move(*x));
        return out;
    }

    std::vector<std::string> to_strings() const
    {
        std::vector<std::string> out;
        out.reserve(parts_.size());
        for (const auto& p : parts_)
            out.push_back(p.str());
        return out;
    }

    static IntervalUnion from_strings(const std::vector<std::string>& items)
    {
        std::vector<DyInterval> ivs;
        ivs.reserve(items.size());
        for (const auto& s : items)
            ivs.push_back(DyInterval::parse(s));
        return from_intervals(std::move(ivs));
    }

    friend bool operator==(const IntervalUnion&, const IntervalUnion&) = default;

private:
    static bool starts_before(const DyInterval& a, const DyInterval& b)
    {
        if (a.lo() != b.lo())
            return a.lo() < b.lo();
        return a.lo_closed() && !b.lo_closed();
    }

    // true when a and b have a connected union
    static bool mergeable(const DyInterval& a, const DyInterval& b)
    {
        const DyInterval& x = starts_before(b, a) ? b : a;
        const DyInterval& y = starts_before(b, a) ? a : b;
        if (y.lo() < x.hi())
            return true;
        if (y.lo() == x.hi())
            return x.hi_closed() || y.lo_closed();
        return false;
    }

    static DyInterval hull(const DyInterval& a, const DyInterval& b)
    {
        bool lc;
        Dyadic lo;
        if (a.lo() == b.lo()) {
            lo = a.lo();
            lc = a.lo_closed() || b.lo_closed();
        } else if (a.lo() < b.lo()) {
            lo = a.lo();
            lc = a.lo_closed();
        } else {
            lo = b.lo();
            lc = b.lo_closed();
        }
        bool hc;
        Dyadic hi;
        if (a.hi() == b.hi()) {
            hi = a.hi();
            hc = a.hi_closed() || b.hi_closed();
        } else if (a.hi() > b.hi()) {
            hi = a.hi();
            hc = a.hi_closed();
        } else {
            hi = b.hi();
            hc = b.hi_closed();
        }
        return {lo, hi, lc, hc};
    }

    std::vector<DyInterval> parts_;
};

/// union_insert(u, iv): the canonical union of u and iv.
inline IntervalUnion union_insert(const IntervalUnion& u, const DyInterval& iv) { return u.inserted(iv); }

} // namespace dyadlab
