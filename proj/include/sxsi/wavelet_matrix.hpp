#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sxsi/bit_vector.hpp"

namespace sxsi {

/// Wavelet matrix over integers in [0, 2^levels): one BitVector per bit of
/// the symbol, most significant bit first.
class WaveletMatrix {
public:
    WaveletMatrix() = default;
    WaveletMatrix(std::span<std::uint32_t const> values, unsigned levels);

    std::size_t size() const { return size_; }
    unsigned levels() const { return static_cast<unsigned>(levels_.size()); }

    std::uint32_t access(std::size_t i) const;
    /// Occurrences of c in positions [0, i).
    std::size_t rank(std::uint32_t c, std::size_t i) const;
    /// Number of positions in [b, e) whose value is < bound.
    std::size_t count_less(std::size_t b, std::size_t e, std::uint64_t bound) const;
    /// Number of positions in [b, e) with value in [lo, hi].
    std::size_t range_count(std::size_t b, std::size_t e, std::uint32_t lo, std::uint32_t hi) const;

    /// Calls f(value) for every position in [b, e) with value in [lo, hi], in
    /// increasing value order. Stops early when f returns false.
    template <typename F>
    void range_report(std::size_t b, std::size_t e, std::uint32_t lo, std::uint32_t hi, F&& f) const {
        if (b >= e || lo > hi || levels_.empty()) return;
        report_rec(0, b, e, 0, lo, hi, f);
    }

    std::size_t size_in_bytes() const;

    void save(Writer& out) const;
    static WaveletMatrix load(Reader& in);

private:
    template <typename F>
    bool report_rec(unsigned level, std::size_t b, std::size_t e, std::uint32_t prefix, std::uint32_t lo,
                    std::uint32_t hi, F& f) const {
        unsigned const shift = levels() - level;
        std::uint32_t const first = prefix << shift;
        std::uint32_t const last = first + static_cast<std::uint32_t>((std::uint64_t{1} << shift) - 1);
        if (last < lo || first > hi || b >= e) return true;
        if (level == levels()) {
            for (std::size_t k = b; k < e; ++k)
                if (!f(prefix)) return false;
            return true;
        }
        auto const& bv = levels_[level];
        std::size_t const b1 = bv.rank1(b), e1 = bv.rank1(e);
        if (!report_rec(level + 1, b - b1, e - e1, prefix << 1, lo, hi, f)) return false;
        return report_rec(level + 1, zeros_[level] + b1, zeros_[level] + e1, (prefix << 1) | 1, lo, hi, f);
    }

    std::size_t size_ = 0;
    std::vector<BitVector> levels_;
    std::vector<std::size_t> zeros_;
};

}  // namespace sxsi
