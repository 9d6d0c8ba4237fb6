#pragma once

// Λ prefixes stored as an origin plus runs of equal gaps. Indices and counts
// are big integers; points are never enumerated.

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dyadlab/dyadic.hpp"
#include "dyadlab/interval.hpp"
#include "dyadlab/progression.hpp"
#include "dyadlab/witness.hpp"

namespace dyadlab::lattice {

struct GapBlock {
    Dyadic gap;
    BigInt count{1};
    std::string tag;

    friend bool operator==(const GapBlock&, const GapBlock&) = default;
};

/// λ_0 = origin, λ_n = origin + d_1 + ... + d_n where the gaps d_n are read
/// off the blocks in order.
class GapBlockSeq {
public:
    GapBlockSeq() = default;
    explicit GapBlockSeq(Dyadic origin) : origin_(std::move(origin)) {}

    GapBlockSeq(Dyadic origin, std::vector<GapBlock> blocks) : origin_(std::move(origin))
    {
        for (auto& b : blocks)
            append(std::move(b));
    }

    void append(GapBlock b)
    {
        if (b.gap.sign() <= 0)
            throw InvalidArgument("gap block needs a positive gap, got " + b.gap.str());
        if (sgn(b.count) < 1)
            throw InvalidArgument("gap block needs count >= 1");
        first_index_.push_back(total_);
        first_value_.push_back(last_);
        last_ += Dyadic(b.count) * b.gap;
        total_ += b.count;
        blocks_.push_back(std::move(b));
    }

    /// Like append, but merges into the last block when the gaps agree.
    void append_coalescing(GapBlock b)
    {
        if (blocks_.empty() || blocks_.back().gap != b.gap || sgn(b.count) < 1) {
            append(std::move(b));
            return;
        }
        GapBlock& tail = blocks_.back();
        if (tail.tag != b.tag && tail.tag.find(b.tag) == std::string::npos)
            tail.tag += "|" + b.tag;
        tail.count += b.count;
        last_ += Dyadic(b.count) * b.gap;
        total_ += b.count;
    }

    const Dyadic& origin() const { return origin_; }
    const std::vector<GapBlock>& blocks() const { return blocks_; }

    /// Index of the last point; the sequence holds total_gaps() + 1 points.
    const BigInt& total_gaps() const { return total_; }
    BigInt size() const { return total_ + 1; }
    Dyadic last() const { return origin_ + last_; }

    /// Index n with λ_n the point just before block b's first gap.
    const BigInt& block_first_index(std::size_t b) const { return first_index_.at(b); }
    Dyadic block_first_value(std::size_t b) const { return origin_ + first_value_.at(b); }

    Dyadic value_at(const BigInt& n) const
    {
        if (sgn(n) < 0 || n > total_)
            throw IndexOutOfRange("index " + n.get_str() + " outside [0, " + total_.get_str() + "]");
        if (sgn(n) == 0)
            return origin_;
        // last block whose first index is < n
        auto it = std::lower_bound(first_index_.begin(), first_index_.end(), n);
        std::size_t b = static_cast<std::size_t>(it - first_index_.begin()) - 1;
        return origin_ + first_value_[b] + Dyadic(BigInt(n - first_index_[b])) * blocks_[b].gap;
    }

    /// #{n : λ_n <= x}.
    BigInt count_upto(const Dyadic& x) const { return count_with(x, true); }

    /// #{n : λ_n < x}.
    BigInt count_below(const Dyadic& x) const { return count_with(x, false); }

    /// The points as arithmetic progressions: the origin, then one per block.
    std::vector<Progression> progressions() const
    {
        std::vector<Progression> out;
        out.reserve(blocks_.size() + 1);
        out.push_back({origin_, blocks_.empty() ? Dyadic(1) : blocks_.front().gap, BigInt(1), "origin"});
        for (std::size_t b = 0; b < blocks_.size(); ++b)
            out.push_back({block_first_value(b) + blocks_[b].gap, blocks_[b].gap, blocks_[b].count, blocks_[b].tag});
        return out;
    }

    /// λ_0 .. λ_n.
    GapBlockSeq prefix(const BigInt& n) const
    {
        if (sgn(n) < 0 || n > total_)
            throw IndexOutOfRange("prefix length " + n.get_str() + " outside [0, " + total_.get_str() + "]");
        GapBlockSeq out(origin_);
        for (std::size_t b = 0; b < blocks_.size() && first_index_[b] < n; ++b) {
            GapBlock blk = blocks_[b];
            if (first_index_[b] + blk.count > n)
                blk.count = n - first_index_[b];
            out.append(std::move(blk));
        }
        return out;
    }

    friend bool operator==(const GapBlockSeq& a, const GapBlockSeq& b)
    {
        return a.origin_ == b.origin_ && a.blocks_ == b.blocks_;
    }

private:
    BigInt count_with(const Dyadic& x, bool inclusive) const
    {
        if (inclusive ? x < origin_ : x <= origin_)
            return 0;
        BigInt n = 1;
        for (std::size_t b = 0; b < blocks_.size(); ++b) {
            Dyadic start = origin_ + first_value_[b];
            if (inclusive ? x < start + blocks_[b].gap : x <= start + blocks_[b].gap)
                break;
            auto [q, r] = floor_ratio(x - start, blocks_[b].gap);
            if (!inclusive && r.is_zero())
                q -= 1;
            n += std::min(q, blocks_[b].count);
        }
        return n;
    }

    Dyadic origin_;
    std::vector<GapBlock> blocks_;
    std::vector<BigInt> first_index_;
    std::vector<Dyadic> first_value_; // offsets from origin
    BigInt total_{0};
    Dyadic last_;
};

inline Dyadic seq_value_at(const GapBlockSeq& seq, const BigInt& n) { return seq.value_at(n); }
inline BigInt seq_count_upto(const GapBlockSeq& seq, const Dyadic& x) { return seq.count_upto(x); }

/// Passes iff the gap never increases along the sequence. On failure the
/// report names the first block whose gap exceeds its predecessor's.
inline WitnessReport seq_check_monotone_gaps(const GapBlockSeq& seq)
{
    const auto& blocks = seq.blocks();
    for (std::size_t b = 1; b < blocks.size(); ++b) {
        if (blocks[b - 1].gap < blocks[b].gap) {
            WitnessReport r{"lattice.monotone_gaps", {}, blocks[b].gap.str(), blocks[b - 1].gap.str(), false};
            r.with("block", std::to_string(b));
            r.with("gap_index", seq.block_first_index(b).get_str());
            r.with("tag", blocks[b].tag);
            return r;
        }
    }
    WitnessReport r{"lattice.monotone_gaps", {}, "", "", true};
    r.with("blocks", std::to_string(blocks.size()));
    if (!blocks.empty()) {
        r.lhs = blocks.back().gap.str();
        r.rhs = blocks.front().gap.str();
    }
    return r;
}

/// Largest gap λ_n - λ_{n-1} with both endpoints in the closed window, or
/// nullopt when no gap fits.
inline std::optional<Dyadic> max_gap_within(const GapBlockSeq& seq, const Dyadic& lo, const Dyadic& hi)
{
    std::optional<Dyadic> best;
    for (std::size_t b = 0; b < seq.blocks().size(); ++b) {
        const auto& blk = seq.blocks()[b];
        if (hi - blk.gap < lo)
            continue;
        // left endpoints λ_{N_b + t}, t in [0, count)
        if (count_ap_in_interval(seq.block_first_value(b), blk.gap, blk.count,
                                 DyInterval::closed(lo, hi - blk.gap)) > 0)
            if (!best || *best < blk.gap)
                best = blk.gap;
    }
    return best;
}

/// The lattice step*Z restricted to a window.
struct LatticeSegment {
    Dyadic step;
    DyInterval window;
    std::string tag;
};

namespace detail {

inline bool on_lattice(const Dyadic& x, const Dyadic& step) { return floor_ratio(x, step).second.is_zero(); }

inline void push_run(std::optional<GapBlockSeq>& seq, Dyadic& last, const Dyadic& first, const Dyadic& step,
                     const BigInt& count, const std::string& tag)
{
    if (!seq) {
        seq.emplace(first);
    } else {
        seq->append_coalescing({first - last, BigInt(1), tag});
    }
    if (count > 1)
        seq->append_coalescing({step, BigInt(count - 1), tag});
    last = first + Dyadic(BigInt(count - 1)) * step;
}

} // namespace detail

/// Sorted, duplicate-free union of the points of all segments, as a gap block
/// sequence. Steps must be powers of two, so the lattices are nested and the
/// union on any open cell between window endpoints is the finest active one.
inline GapBlockSeq merge_lattice_segments(const std::vector<LatticeSegment>& segments)
{
    for (const auto& s : segments)
        if (s.step.sign() <= 0 || !s.step.is_power_of_two())
            throw InvalidArgument("lattice segment step must be a power of two: " + s.step.str());

    std::vector<Dyadic> cuts;
    for (const auto& s : segments) {
        cuts.push_back(s.window.lo());
        cuts.push_back(s.window.hi());
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::optional<GapBlockSeq> seq;
    Dyadic last;
    for (std::size_t i = 0; i < cuts.size(); ++i) {
        const Dyadic& p = cuts[i];
        const LatticeSegment* hit = nullptr;
        for (const auto& s : segments)
            if (s.window.contains(p) && detail::on_lattice(p, s.step))
                if (!hit || s.step < hit->step)
                    hit = &s;
        if (hit)
            detail::push_run(seq, last, p, hit->step, BigInt(1), hit->tag);

        if (i + 1 == cuts.size())
            break;
        const Dyadic& q = cuts[i + 1];
        const LatticeSegment* finest = nullptr;
        for (const auto& s : segments)
            if (s.window.lo() <= p && q <= s.window.hi())
                if (!finest || s.step < finest->step)
                    finest = &s;
        if (!finest)
            continue;
        BigInt k_lo = floor_div(p, finest->step) + 1;
        BigInt k_hi = ceil_div(q, finest->step) - 1;
        if (k_lo > k_hi)
            continue;
        detail::push_run(seq, last, Dyadic(k_lo) * finest->step, finest->step, BigInt(k_hi - k_lo + 1),
                         finest->tag);
    }
    if (!seq)
        throw InvalidArgument("lattice segments contain no points");
    return *seq;
}

} // namespace dyadlab::lattice
