#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sxsi/bit_vector.hpp"

namespace sxsi {

/// Balanced parentheses (1 = open) with a block min-excess directory for
/// matching and enclosing queries. Positions are 0-based.
///
/// excess(p) is the depth after reading the prefix [0, p).
class BalancedParens {
public:
    BalancedParens() = default;
    explicit BalancedParens(BitVector bits);

    std::size_t size() const { return bits_.size(); }
    bool is_open(std::size_t p) const { return bits_[p]; }
    BitVector const& bits() const { return bits_; }

    long excess(std::size_t p) const { return 2 * static_cast<long>(bits_.rank1(p)) - static_cast<long>(p); }

    std::size_t find_close(std::size_t open) const;
    std::size_t find_open(std::size_t close) const;
    /// Opening position of the nearest pair strictly containing `open`, or npos.
    std::size_t enclose(std::size_t open) const;

    std::size_t size_in_bytes() const { return bits_.size_in_bytes() + tree_.size() * sizeof(std::int32_t); }

    void save(Writer& out) const;
    static BalancedParens load(Reader& in);

private:
    static constexpr std::size_t kBlockBits = 256;

    void build_directory();
    /// Smallest p > from with excess(p) <= target, or npos.
    std::size_t forward_search(std::size_t from, long target) const;
    /// Largest p <= from with excess(p) <= target, or npos.
    std::size_t backward_search(std::size_t from, long target) const;
    std::size_t next_block_at_most(std::size_t block, long target) const;
    std::size_t prev_block_at_most(std::size_t block, long target) const;

    BitVector bits_;
    std::size_t leaves_ = 0;            // power of two >= number of blocks
    std::vector<std::int32_t> tree_;    // min excess per block over [start, end], as a heap
};

}  // namespace sxsi
