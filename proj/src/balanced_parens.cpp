#include "sxsi/balanced_parens.hpp"

#include <algorithm>
#include <array>
#include <limits>

namespace sxsi {

namespace {

// Per byte, bits read least significant first (+1 open, -1 close):
//   total       net excess change,
//   forward_min min over the 8 running sums,
//   backward_min min over the running sums when undoing bits from the top.
struct ByteTables {
    std::array<std::int8_t, 256> total{}, forward_min{}, backward_min{};

    ByteTables() {
        for (int v = 0; v < 256; ++v) {
            int sum = 0, fmin = 8;
            for (int k = 0; k < 8; ++k) {
                sum += (v >> k) & 1 ? 1 : -1;
                fmin = std::min(fmin, sum);
            }
            int back = 0, bmin = 8;
            for (int k = 7; k >= 0; --k) {
                back -= (v >> k) & 1 ? 1 : -1;
                bmin = std::min(bmin, back);
            }
            total[v] = static_cast<std::int8_t>(sum);
            forward_min[v] = static_cast<std::int8_t>(fmin);
            backward_min[v] = static_cast<std::int8_t>(bmin);
        }
    }
};

ByteTables const& tables() {
    static ByteTables const t;
    return t;
}

}  // namespace

BalancedParens::BalancedParens(BitVector bits) : bits_(std::move(bits)) { build_directory(); }

void BalancedParens::build_directory() {
    std::size_t const blocks = (bits_.size() + kBlockBits - 1) / kBlockBits;
    leaves_ = 1;
    while (leaves_ < std::max<std::size_t>(blocks, 1)) leaves_ <<= 1;
    tree_.assign(2 * leaves_, std::numeric_limits<std::int32_t>::max());
    long e = 0, block_min = 0;
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (i % kBlockBits == 0) block_min = e;
        e += bits_[i] ? 1 : -1;
        block_min = std::min(block_min, e);
        if ((i + 1) % kBlockBits == 0 || i + 1 == bits_.size())
            tree_[leaves_ + i / kBlockBits] = static_cast<std::int32_t>(block_min);
    }
    for (std::size_t v = leaves_ - 1; v >= 1; --v) tree_[v] = std::min(tree_[2 * v], tree_[2 * v + 1]);
}

std::size_t BalancedParens::next_block_at_most(std::size_t block, long target) const {
    std::size_t v = leaves_ + block;
    while (v > 1) {
        if (v % 2 == 0 && tree_[v + 1] <= target) {
            v = v + 1;
            while (v < leaves_) v = tree_[2 * v] <= target ? 2 * v : 2 * v + 1;
            return v - leaves_;
        }
        v /= 2;
    }
    return npos;
}

std::size_t BalancedParens::prev_block_at_most(std::size_t block, long target) const {
    std::size_t v = leaves_ + block;
    while (v > 1) {
        if (v % 2 == 1 && tree_[v - 1] <= target) {
            v = v - 1;
            while (v < leaves_) v = tree_[2 * v + 1] <= target ? 2 * v + 1 : 2 * v;
            return v - leaves_;
        }
        v /= 2;
    }
    return npos;
}

std::size_t BalancedParens::forward_search(std::size_t from, long target) const {
    auto const& t = tables();
    auto const words = bits_.words();
    std::size_t const n = bits_.size();
    if (from >= n) return npos;

    // Scans bits [i, limit) starting at excess e; returns the prefix length reaching target.
    auto scan = [&](std::size_t i, std::size_t limit, long e) -> std::size_t {
        while (i < limit) {
            if (i % 8 == 0 && i + 8 <= limit) {
                unsigned const byte = (words[i / 64] >> (i % 64)) & 0xFF;
                if (e + t.forward_min[byte] > target) {
                    e += t.total[byte];
                    i += 8;
                    continue;
                }
            }
            e += bits_[i] ? 1 : -1;
            ++i;
            if (e <= target) return i;
        }
        return npos;
    };

    std::size_t const block = from / kBlockBits;
    std::size_t const p = scan(from, std::min(n, (block + 1) * kBlockBits), excess(from));
    if (p != npos) return p;
    std::size_t const next = next_block_at_most(block, target);
    if (next == npos) return npos;
    std::size_t const start = next * kBlockBits;
    return scan(start, std::min(n, start + kBlockBits), excess(start));
}

std::size_t BalancedParens::backward_search(std::size_t from, long target) const {
    auto const& t = tables();
    auto const words = bits_.words();

    // Undoes bits [limit, i) from the top starting at excess e = excess(i).
    auto scan = [&](std::size_t i, std::size_t limit, long e) -> std::size_t {
        if (e <= target) return i;
        while (i > limit) {
            if (i % 8 == 0 && i - 8 >= limit) {
                unsigned const byte = (words[(i - 8) / 64] >> ((i - 8) % 64)) & 0xFF;
                if (e + t.backward_min[byte] > target) {
                    e -= t.total[byte];
                    i -= 8;
                    continue;
                }
            }
            --i;
            e -= bits_[i] ? 1 : -1;
            if (e <= target) return i;
        }
        return npos;
    };

    long const e = excess(from);
    if (e <= target) return from;
    if (from == 0) return npos;
    std::size_t const block = (from - 1) / kBlockBits;
    std::size_t const p = scan(from, block * kBlockBits, e);
    if (p != npos) return p;
    std::size_t const prev = prev_block_at_most(block, target);
    if (prev == npos) return npos;
    std::size_t const end = std::min(bits_.size(), (prev + 1) * kBlockBits);
    return scan(end, prev * kBlockBits, excess(end));
}

std::size_t BalancedParens::find_close(std::size_t open) const {
    std::size_t const p = forward_search(open + 1, excess(open));
    return p == npos ? npos : p - 1;
}

std::size_t BalancedParens::find_open(std::size_t close) const {
    return backward_search(close, excess(close + 1));
}

std::size_t BalancedParens::enclose(std::size_t open) const {
    if (open == 0) return npos;
    return backward_search(open - 1, excess(open) - 1);
}

void BalancedParens::save(Writer& out) const { bits_.save(out); }

BalancedParens BalancedParens::load(Reader& in) {
    BalancedParens bp;
    bp.bits_ = BitVector::load(in);
    bp.build_directory();
    return bp;
}

}  // namespace sxsi
