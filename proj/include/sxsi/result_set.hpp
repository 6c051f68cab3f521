#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace sxsi {

/// Set of identifiers in [1, cap] kept as a perfect binary tree of marks.
/// An id is present iff every mark on its root-to-leaf path is set.
class MarkTree {
public:
    explicit MarkTree(std::size_t n = 1);

    std::size_t capacity() const { return cap_; }

    void insert(std::size_t id);
    void remove_range(std::size_t lo, std::size_t hi);
    bool contains(std::size_t id) const;

    std::vector<std::size_t> enumerate() const;
    std::size_t size() const;

    /// Marks written by the most recent insert or remove_range.
    std::size_t last_touched() const { return touched_; }

    /// Bytes held by the marks (one bit per tree node).
    std::size_t size_in_bytes() const { return marks_.size() * sizeof(std::uint64_t); }

private:
    void check(std::size_t id) const;
    bool get(std::size_t v) const { return (marks_[v / 64] >> (v % 64)) & 1; }
    void set(std::size_t v, bool b) {
        if (b) marks_[v / 64] |= std::uint64_t{1} << (v % 64);
        else marks_[v / 64] &= ~(std::uint64_t{1} << (v % 64));
    }

    std::size_t cap_ = 1;
    unsigned height_ = 0;
    std::vector<std::uint64_t> marks_;  // bit per node, heap order, root at 1
    std::size_t touched_ = 0;
};

}  // namespace sxsi
