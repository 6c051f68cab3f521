#include "sxsi/bit_vector.hpp"

#include <algorithm>
#include <bit>
#include <cassert>

namespace sxsi {

namespace {

// Position of the k-th (0-based) set bit of w.
unsigned select_in_word(std::uint64_t w, unsigned k) {
    for (unsigned i = 0; i < k; ++i) w &= w - 1;
    return static_cast<unsigned>(std::countr_zero(w));
}

}  // namespace

unsigned bits_for(std::uint64_t max_value) {
    return max_value == 0 ? 1 : static_cast<unsigned>(std::bit_width(max_value));
}

// ---------------------------------------------------------------- IntVector

IntVector::IntVector(std::size_t size, unsigned width)
    : words_((size * width + 63) / 64 + 1, 0), size_(size), width_(width) {
    assert(width <= 64);
}

void IntVector::set(std::size_t i, std::uint64_t value) {
    if (width_ == 0) return;
    std::uint64_t const mask = width_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width_) - 1;
    value &= mask;
    std::size_t const bit = i * width_;
    std::size_t const w = bit / 64;
    unsigned const off = bit % 64;
    words_[w] = (words_[w] & ~(mask << off)) | (value << off);
    if (off + width_ > 64) {
        unsigned const spill = off + width_ - 64;
        std::uint64_t const hi_mask = (std::uint64_t{1} << spill) - 1;
        words_[w + 1] = (words_[w + 1] & ~hi_mask) | (value >> (64 - off));
    }
}

void IntVector::save(Writer& out) const {
    out.put<std::uint64_t>(size_);
    out.put<std::uint64_t>(width_);
    out.put_vector(words_);
}

IntVector IntVector::load(Reader& in) {
    IntVector v;
    v.size_ = in.get<std::uint64_t>();
    v.width_ = static_cast<unsigned>(in.get<std::uint64_t>());
    v.words_ = in.get_vector<std::uint64_t>();
    if (v.width_ > 64 || v.words_.size() < (v.size_ * v.width_ + 63) / 64 + 1)
        throw FormatError("corrupt packed integer vector");
    return v;
}

// ---------------------------------------------------------------- BitVector

BitVector::BitVector(std::span<bool const> bits) : words_((bits.size() + 63) / 64, 0), size_(bits.size()) {
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) words_[i / 64] |= std::uint64_t{1} << (i % 64);
    build_directory();
}

BitVector::BitVector(std::vector<bool> const& bits) : words_((bits.size() + 63) / 64, 0), size_(bits.size()) {
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) words_[i / 64] |= std::uint64_t{1} << (i % 64);
    build_directory();
}

BitVector::BitVector(std::vector<std::uint64_t> words, std::size_t size) : words_(std::move(words)), size_(size) {
    words_.resize((size + 63) / 64, 0);
    if (size % 64 != 0 && !words_.empty()) words_.back() &= (std::uint64_t{1} << (size % 64)) - 1;
    build_directory();
}

void BitVector::build_directory() {
    std::size_t const blocks = (words_.size() + kWordsPerBlock - 1) / kWordsPerBlock + 1;
    block_.assign(blocks, 0);
    super_.assign(blocks / kBlocksPerSuper + 2, 0);
    std::size_t total = 0;
    for (std::size_t b = 0; b < blocks; ++b) {
        if (b % kBlocksPerSuper == 0) super_[b / kBlocksPerSuper] = total;
        block_[b] = static_cast<std::uint16_t>(total - super_[b / kBlocksPerSuper]);
        for (std::size_t w = b * kWordsPerBlock; w < std::min(words_.size(), (b + 1) * kWordsPerBlock); ++w)
            total += static_cast<std::size_t>(std::popcount(words_[w]));
    }
    ones_ = total;
}

std::size_t BitVector::rank1(std::size_t i) const {
    if (i > size_) throw std::out_of_range("BitVector::rank: position beyond size");
    std::size_t const block = i / kBlockBits;
    std::size_t r = ones_before_block(block);
    std::size_t const last_word = i / 64;
    for (std::size_t w = block * kWordsPerBlock; w < last_word; ++w)
        r += static_cast<std::size_t>(std::popcount(words_[w]));
    if (i % 64 != 0) r += static_cast<std::size_t>(std::popcount(words_[last_word] & ((std::uint64_t{1} << (i % 64)) - 1)));
    return r;
}

std::size_t BitVector::select1_index(std::size_t j) const {
    if (j == 0 || j > ones_) return npos;
    // Last superblock whose prefix count is < j.
    auto it = std::partition_point(super_.begin(), super_.begin() + static_cast<std::ptrdiff_t>((block_.size() - 1) / kBlocksPerSuper + 1),
                                   [j](std::uint64_t c) { return c < j; });
    std::size_t sb = static_cast<std::size_t>(it - super_.begin()) - 1;
    std::size_t b = sb * kBlocksPerSuper;
    while (b + 1 < block_.size() && (b + 1) / kBlocksPerSuper == sb && ones_before_block(b + 1) < j) ++b;
    std::size_t remaining = j - ones_before_block(b);
    for (std::size_t w = b * kWordsPerBlock; w < words_.size(); ++w) {
        auto const c = static_cast<std::size_t>(std::popcount(words_[w]));
        if (c >= remaining) return w * 64 + select_in_word(words_[w], static_cast<unsigned>(remaining - 1));
        remaining -= c;
    }
    return npos;
}

std::size_t BitVector::select0_index(std::size_t j) const {
    if (j == 0 || j > size_ - ones_) return npos;
    std::size_t const supers = (block_.size() - 1) / kBlocksPerSuper + 1;
    std::size_t lo = 0, hi = supers;  // find last sb with zeros_before(sb) < j
    while (hi - lo > 1) {
        std::size_t const mid = (lo + hi) / 2;
        if (mid * kSuperBits - super_[mid] < j) lo = mid;
        else hi = mid;
    }
    std::size_t b = lo * kBlocksPerSuper;
    auto zeros_before = [this](std::size_t blk) { return blk * kBlockBits - ones_before_block(blk); };
    while (b + 1 < block_.size() && (b + 1) / kBlocksPerSuper == lo && zeros_before(b + 1) < j) ++b;
    std::size_t remaining = j - zeros_before(b);
    for (std::size_t w = b * kWordsPerBlock; w < words_.size(); ++w) {
        std::uint64_t inv = ~words_[w];
        if (w == words_.size() - 1 && size_ % 64 != 0) inv &= (std::uint64_t{1} << (size_ % 64)) - 1;
        auto const c = static_cast<std::size_t>(std::popcount(inv));
        if (c >= remaining) return w * 64 + select_in_word(inv, static_cast<unsigned>(remaining - 1));
        remaining -= c;
    }
    return npos;
}

std::optional<std::size_t> BitVector::select(bool bit, std::size_t j) const {
    std::size_t const p = bit ? select1_index(j) : select0_index(j);
    if (p == npos) return std::nullopt;
    return p + 1;
}

std::size_t BitVector::size_in_bytes() const {
    return words_.size() * 8 + super_.size() * 8 + block_.size() * 2;
}

void BitVector::save(Writer& out) const {
    out.put<std::uint64_t>(size_);
    out.put_vector(words_);
}

BitVector BitVector::load(Reader& in) {
    auto const size = in.get<std::uint64_t>();
    auto words = in.get_vector<std::uint64_t>();
    if (words.size() != (size + 63) / 64) throw FormatError("corrupt bitvector");
    return BitVector(std::move(words), size);
}

// ---------------------------------------------------------------- SparseBitSequence

SparseBitSequence::SparseBitSequence(std::span<std::uint64_t const> positions, std::uint64_t universe)
    : universe_(universe) {
    std::size_t const k = positions.size();
    low_bits_ = (k == 0 || universe <= k) ? 0 : static_cast<unsigned>(std::bit_width(universe / k) - 1);
    lows_ = IntVector(k, low_bits_);
    std::size_t const high_len = k + static_cast<std::size_t>(universe >> low_bits_) + 1;
    std::vector<std::uint64_t> words((high_len + 63) / 64, 0);
    std::uint64_t const mask = (std::uint64_t{1} << low_bits_) - 1;
    for (std::size_t i = 0; i < k; ++i) {
        assert(positions[i] < universe && (i == 0 || positions[i] > positions[i - 1]));
        lows_.set(i, positions[i] & mask);
        std::size_t const h = static_cast<std::size_t>(positions[i] >> low_bits_) + i;
        words[h / 64] |= std::uint64_t{1} << (h % 64);
    }
    highs_ = BitVector(std::move(words), high_len);
}

std::size_t SparseBitSequence::select1_index(std::size_t j) const {
    if (j == 0 || j > count()) return npos;
    std::size_t const h = highs_.select1_index(j) - (j - 1);
    return (h << low_bits_) | static_cast<std::size_t>(lows_[j - 1]);
}

std::optional<std::size_t> SparseBitSequence::select1(std::size_t j) const {
    std::size_t const p = select1_index(j);
    if (p == npos) return std::nullopt;
    return p + 1;
}

std::size_t SparseBitSequence::rank1(std::uint64_t p) const {
    if (p >= universe_) return count();
    std::uint64_t const h = p >> low_bits_;
    std::uint64_t const low = p & ((std::uint64_t{1} << low_bits_) - 1);
    std::size_t idx, hp;
    if (h == 0) {
        idx = 0;
        hp = 0;
    } else {
        std::size_t const z = highs_.select0_index(h);
        idx = z - (h - 1);
        hp = z + 1;
    }
    while (hp < highs_.size() && highs_[hp] && lows_[idx] < low) {
        ++idx;
        ++hp;
    }
    return idx;
}

void SparseBitSequence::save(Writer& out) const {
    out.put<std::uint64_t>(universe_);
    out.put<std::uint64_t>(low_bits_);
    lows_.save(out);
    highs_.save(out);
}

SparseBitSequence SparseBitSequence::load(Reader& in) {
    SparseBitSequence s;
    s.universe_ = in.get<std::uint64_t>();
    s.low_bits_ = static_cast<unsigned>(in.get<std::uint64_t>());
    s.lows_ = IntVector::load(in);
    s.highs_ = BitVector::load(in);
    return s;
}

}  // namespace sxsi
