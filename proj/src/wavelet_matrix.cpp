#include "sxsi/wavelet_matrix.hpp"

namespace sxsi {

WaveletMatrix::WaveletMatrix(std::span<std::uint32_t const> values, unsigned levels) : size_(values.size()) {
    std::vector<std::uint32_t> cur(values.begin(), values.end()), next(values.size());
    levels_.reserve(levels);
    for (unsigned l = 0; l < levels; ++l) {
        unsigned const shift = levels - 1 - l;
        std::vector<std::uint64_t> words((size_ + 63) / 64, 0);
        std::size_t zeros = 0;
        for (std::size_t i = 0; i < size_; ++i) {
            if ((cur[i] >> shift) & 1) words[i / 64] |= std::uint64_t{1} << (i % 64);
            else ++zeros;
        }
        // Stable partition: zeros first, then ones.
        std::size_t z = 0, o = zeros;
        for (std::size_t i = 0; i < size_; ++i) {
            if ((cur[i] >> shift) & 1) next[o++] = cur[i];
            else next[z++] = cur[i];
        }
        cur.swap(next);
        levels_.emplace_back(std::move(words), size_);
        zeros_.push_back(zeros);
    }
}

std::uint32_t WaveletMatrix::access(std::size_t i) const {
    std::uint32_t value = 0;
    for (unsigned l = 0; l < levels(); ++l) {
        auto const& bv = levels_[l];
        bool const bit = bv[i];
        value = (value << 1) | static_cast<std::uint32_t>(bit);
        i = bit ? zeros_[l] + bv.rank1(i) : bv.rank0(i);
    }
    return value;
}

std::size_t WaveletMatrix::rank(std::uint32_t c, std::size_t i) const {
    if (levels_.empty()) return c == 0 ? i : 0;
    if ((static_cast<std::uint64_t>(c) >> levels()) != 0) return 0;
    std::size_t b = 0;
    for (unsigned l = 0; l < levels(); ++l) {
        auto const& bv = levels_[l];
        bool const bit = (c >> (levels() - 1 - l)) & 1;
        if (bit) {
            b = zeros_[l] + bv.rank1(b);
            i = zeros_[l] + bv.rank1(i);
        } else {
            b = bv.rank0(b);
            i = bv.rank0(i);
        }
    }
    return i - b;
}

std::size_t WaveletMatrix::count_less(std::size_t b, std::size_t e, std::uint64_t bound) const {
    if (b >= e) return 0;
    if (bound >> levels()) return e - b;
    std::size_t count = 0;
    for (unsigned l = 0; l < levels(); ++l) {
        auto const& bv = levels_[l];
        bool const bit = (bound >> (levels() - 1 - l)) & 1;
        std::size_t const b1 = bv.rank1(b), e1 = bv.rank1(e);
        if (bit) {
            count += (e - e1) - (b - b1);
            b = zeros_[l] + b1;
            e = zeros_[l] + e1;
        } else {
            b -= b1;
            e -= e1;
        }
    }
    return count;
}

std::size_t WaveletMatrix::range_count(std::size_t b, std::size_t e, std::uint32_t lo, std::uint32_t hi) const {
    if (lo > hi) return 0;
    return count_less(b, e, std::uint64_t{hi} + 1) - count_less(b, e, lo);
}

std::size_t WaveletMatrix::size_in_bytes() const {
    std::size_t total = zeros_.size() * 8;
    for (auto const& bv : levels_) total += bv.size_in_bytes();
    return total;
}

void WaveletMatrix::save(Writer& out) const {
    out.put<std::uint64_t>(size_);
    out.put<std::uint64_t>(levels_.size());
    for (std::size_t l = 0; l < levels_.size(); ++l) {
        out.put<std::uint64_t>(zeros_[l]);
        levels_[l].save(out);
    }
}

WaveletMatrix WaveletMatrix::load(Reader& in) {
    WaveletMatrix wm;
    wm.size_ = in.get<std::uint64_t>();
    auto const levels = in.get<std::uint64_t>();
    if (levels > 32) throw FormatError("wavelet matrix: too many levels");
    for (std::uint64_t l = 0; l < levels; ++l) {
        wm.zeros_.push_back(in.get<std::uint64_t>());
        wm.levels_.push_back(BitVector::load(in));
        if (wm.levels_.back().size() != wm.size_) throw FormatError("wavelet matrix: level size mismatch");
    }
    return wm;
}

}  // namespace sxsi
