#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "sxsi/serialize.hpp"

namespace sxsi {

inline constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

/// Fixed-width packed integer array.
class IntVector {
public:
    IntVector() = default;
    IntVector(std::size_t size, unsigned width);

    std::uint64_t operator[](std::size_t i) const {
        if (width_ == 0) return 0;
        std::size_t const bit = i * width_;
        std::size_t const w = bit / 64;
        unsigned const off = bit % 64;
        std::uint64_t v = words_[w] >> off;
        if (off + width_ > 64) v |= words_[w + 1] << (64 - off);
        return width_ == 64 ? v : v & ((std::uint64_t{1} << width_) - 1);
    }

    void set(std::size_t i, std::uint64_t value);

    std::size_t size() const { return size_; }
    unsigned width() const { return width_; }
    std::size_t size_in_bytes() const { return words_.size() * 8; }

    void save(Writer& out) const;
    static IntVector load(Reader& in);

private:
    std::vector<std::uint64_t> words_;
    std::size_t size_ = 0;
    unsigned width_ = 0;
};

/// Number of bits needed to store values in [0, max_value].
unsigned bits_for(std::uint64_t max_value);

/// Plain bitvector with a two-level rank directory.
///
/// rank takes a prefix length (rank1(i) counts ones in bits [0, i)), select
/// takes a 1-based ordinal. The `_index` variants return 0-based positions or
/// npos; `select` returns the 1-based position or nullopt.
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::span<bool const> bits);
    explicit BitVector(std::vector<bool> const& bits);
    BitVector(std::vector<std::uint64_t> words, std::size_t size);

    bool operator[](std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1; }

    std::size_t size() const { return size_; }
    std::size_t ones() const { return ones_; }

    std::size_t rank1(std::size_t i) const;
    std::size_t rank0(std::size_t i) const { return i - rank1(i); }
    std::size_t rank(bool bit, std::size_t i) const { return bit ? rank1(i) : rank0(i); }

    std::size_t select1_index(std::size_t j) const;
    std::size_t select0_index(std::size_t j) const;
    std::optional<std::size_t> select(bool bit, std::size_t j) const;

    std::span<std::uint64_t const> words() const { return words_; }
    std::size_t size_in_bytes() const;

    void save(Writer& out) const;
    static BitVector load(Reader& in);

private:
    static constexpr std::size_t kSuperBits = 2048;
    static constexpr std::size_t kBlockBits = 512;
    static constexpr std::size_t kWordsPerBlock = kBlockBits / 64;
    static constexpr std::size_t kBlocksPerSuper = kSuperBits / kBlockBits;

    void build_directory();
    std::size_t ones_before_block(std::size_t block) const {
        return super_[block / kBlocksPerSuper] + block_[block];
    }

    std::vector<std::uint64_t> words_;
    std::size_t size_ = 0;
    std::size_t ones_ = 0;
    std::vector<std::uint64_t> super_;
    std::vector<std::uint16_t> block_;
};

/// Elias-Fano encoded strictly increasing position set over a universe [0, m).
class SparseBitSequence {
public:
    SparseBitSequence() = default;
    SparseBitSequence(std::span<std::uint64_t const> positions, std::uint64_t universe);

    std::uint64_t universe() const { return universe_; }
    std::size_t count() const { return lows_.size(); }

    /// Number of set positions < p.
    std::size_t rank1(std::uint64_t p) const;
    /// 0-based position of the j-th (1-based) set bit, or npos.
    std::size_t select1_index(std::size_t j) const;
    std::optional<std::size_t> select1(std::size_t j) const;

    std::size_t size_in_bytes() const { return lows_.size_in_bytes() + highs_.size_in_bytes(); }

    void save(Writer& out) const;
    static SparseBitSequence load(Reader& in);

private:
    std::uint64_t universe_ = 0;
    unsigned low_bits_ = 0;
    IntVector lows_;
    BitVector highs_;
};

}  // namespace sxsi
