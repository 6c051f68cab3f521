#include "sxsi/result_set.hpp"

#include <stdexcept>
#include <string>

namespace sxsi {

MarkTree::MarkTree(std::size_t n) {
    while (cap_ < n) {
        cap_ <<= 1;
        ++height_;
    }
    marks_.assign((2 * cap_ + 63) / 64, 0);
}

void MarkTree::check(std::size_t id) const {
    if (id < 1 || id > cap_) throw std::out_of_range("id " + std::to_string(id) + " outside the set domain");
}

void MarkTree::insert(std::size_t id) {
    check(id);
    touched_ = 0;
    std::size_t const leaf = cap_ + id - 1;
    std::size_t v = 1;
    bool cleared = false;  // an ancestor on the path was unmarked before this call
    for (unsigned level = height_; level > 0; --level) {
        std::size_t const on = leaf >> (level - 1);
        std::size_t const off = on ^ 1;
        cleared = cleared || !get(v);
        if (cleared) {
            // The off-path child must stay empty once v becomes marked.
            set(off, false);
            ++touched_;
        }
        set(v, true);
        ++touched_;
        v = on;
    }
    set(v, true);
    ++touched_;
}

void MarkTree::remove_range(std::size_t lo, std::size_t hi) {
    check(lo);
    check(hi);
    if (lo > hi) throw std::invalid_argument("empty range");
    touched_ = 0;
    std::size_t l = cap_ + lo - 1, r = cap_ + hi;  // half-open over leaves
    while (l < r) {
        if (l & 1) {
            set(l++, false);
            ++touched_;
        }
        if (r & 1) {
            set(--r, false);
            ++touched_;
        }
        l >>= 1;
        r >>= 1;
    }
}

bool MarkTree::contains(std::size_t id) const {
    check(id);
    for (std::size_t v = cap_ + id - 1; v >= 1; v >>= 1)
        if (!get(v)) return false;
    return true;
}

std::vector<std::size_t> MarkTree::enumerate() const {
    std::vector<std::size_t> out;
    std::vector<std::size_t> stack{1};
    while (!stack.empty()) {
        std::size_t const v = stack.back();
        stack.pop_back();
        if (!get(v)) continue;
        if (v >= cap_) {
            out.push_back(v - cap_ + 1);
        } else {
            stack.push_back(2 * v + 1);
            stack.push_back(2 * v);
        }
    }
    return out;
}

std::size_t MarkTree::size() const { return enumerate().size(); }

}  // namespace sxsi
