#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sxsi/balanced_parens.hpp"
#include "sxsi/bit_vector.hpp"
#include "sxsi/document.hpp"
#include "sxsi/text_index.hpp"

namespace sxsi {

/// A node is the 0-based position of its opening parenthesis.
using Node = std::size_t;
inline constexpr Node kNoNode = npos;

/// Tag sequence with one sparse row per code that occurs.
class TagSequence {
public:
    TagSequence() = default;
    TagSequence(std::span<std::uint32_t const> codes, std::uint32_t max_code);

    std::size_t size() const { return codes_.size(); }
    std::uint32_t operator[](std::size_t p) const { return static_cast<std::uint32_t>(codes_[p]); }
    std::uint32_t max_code() const { return static_cast<std::uint32_t>(rows_.size()) - 1; }

    /// Occurrences of code in positions [0, p).
    std::size_t rank(std::uint32_t code, std::size_t p) const;
    /// 0-based position of the j-th (1-based) occurrence of code, or npos.
    std::size_t select(std::uint32_t code, std::size_t j) const;
    std::size_t total(std::uint32_t code) const { return code < rows_.size() ? rows_[code].count() : 0; }

    std::size_t size_in_bytes() const;

    void save(Writer& out) const;
    static TagSequence load(Reader& in);

private:
    IntVector codes_;
    std::vector<SparseBitSequence> rows_;  // indexed by code; row 0 unused
};

/// Succinct XML tree: Par, Tag and the leaf bitmap B.
class TreeIndex {
public:
    TreeIndex() = default;
    explicit TreeIndex(DocumentModel const& model);
    TreeIndex(TagDictionary tags, BalancedParens par, TagSequence tag_seq, BitVector leaves);

    Node root() const { return 0; }
    std::size_t node_count() const { return par_.size() / 2; }
    std::size_t text_count() const { return leaves_.ones(); }
    std::size_t tag_count() const { return tags_.size(); }
    TagDictionary const& tags() const { return tags_; }
    BalancedParens const& par() const { return par_; }

    bool is_open(std::size_t p) const { return par_.is_open(p); }
    std::size_t close(Node x) const { return par_.find_close(x); }
    std::size_t open(std::size_t c) const { return par_.find_open(c); }

    std::size_t preorder(Node x) const { return par_.bits().rank1(x + 1); }
    Node node_at_preorder(std::size_t k) const { return par_.bits().select1_index(k); }
    std::size_t subtree_size(Node x) const { return (close(x) - x + 1) / 2; }
    bool is_ancestor(Node x, Node y) const { return x <= y && y <= close(x); }
    bool is_leaf(Node x) const { return !par_.is_open(x + 1); }

    Node first_child(Node x) const { return par_.is_open(x + 1) ? x + 1 : kNoNode; }
    Node next_sibling(Node x) const;
    Node parent(Node x) const { return par_.enclose(x); }

    TagId tag(Node x) const { return tag_seq_[x]; }
    std::size_t subtree_tags(Node x, TagId t) const;
    Node tagged_desc(Node x, TagId t) const;
    Node tagged_foll(Node x, TagId t) const;
    Node tagged_prec(Node x, TagId t) const;
    /// First node in [begin, end) whose tag is t.
    Node tagged_in(std::size_t begin, std::size_t end, TagId t) const;
    /// Occurrences of opening tag t in the whole document.
    std::size_t tag_total(TagId t) const { return tag_seq_.total(t); }

    std::size_t leaf_number(std::size_t p) const { return leaves_.rank1(p + 1); }
    IdRange text_ids(Node x) const;
    /// Text id of a text leaf, 0 if x is not one.
    TextId text_id(Node x) const { return leaves_[x] ? static_cast<TextId>(leaves_.rank1(x) + 1) : 0; }
    Node text_node(TextId id) const { return leaves_.select1_index(id); }
    std::size_t xml_id_text(TextId id) const { return preorder(text_node(id)); }
    std::size_t xml_id_node(Node x) const { return preorder(x); }

    std::string get_text(TextSource const& texts, TextId id) const;
    std::string get_subtree(TextSource const& texts, Node x) const;

    std::size_t size_in_bytes() const {
        return par_.size_in_bytes() + tag_seq_.size_in_bytes() + leaves_.size_in_bytes();
    }

    BitVector const& leaves() const { return leaves_; }
    TagSequence const& tag_sequence() const { return tag_seq_; }

private:
    void check_node(Node x) const;

    TagDictionary tags_;
    BalancedParens par_;
    TagSequence tag_seq_;
    BitVector leaves_;
};

/// Appends s with XML escaping; quotes are escaped when `attribute` is set.
void append_escaped(std::string& out, std::string_view s, bool attribute);

}  // namespace sxsi
