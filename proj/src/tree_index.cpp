#include "sxsi/tree_index.hpp"

#include <stdexcept>

namespace sxsi {

// ---------------------------------------------------------------- TagSequence

TagSequence::TagSequence(std::span<std::uint32_t const> codes, std::uint32_t max_code)
    : codes_(codes.size(), bits_for(max_code)) {
    std::vector<std::vector<std::uint64_t>> positions(std::size_t{max_code} + 1);
    for (std::size_t p = 0; p < codes.size(); ++p) {
        if (codes[p] == 0 || codes[p] > max_code) throw std::invalid_argument("tag code out of range");
        codes_.set(p, codes[p]);
        positions[codes[p]].push_back(p);
    }
    rows_.reserve(positions.size());
    for (auto const& row : positions) rows_.emplace_back(row, codes.size());
}

std::size_t TagSequence::rank(std::uint32_t code, std::size_t p) const {
    if (code >= rows_.size()) return 0;
    return rows_[code].rank1(p);
}

std::size_t TagSequence::select(std::uint32_t code, std::size_t j) const {
    if (code >= rows_.size() || j == 0) return npos;
    return rows_[code].select1_index(j);
}

std::size_t TagSequence::size_in_bytes() const {
    std::size_t total = codes_.size_in_bytes();
    for (auto const& row : rows_) total += row.size_in_bytes() + 16;
    return total;
}

void TagSequence::save(Writer& out) const {
    codes_.save(out);
    out.put<std::uint64_t>(rows_.size());
    for (auto const& row : rows_) row.save(out);
}

TagSequence TagSequence::load(Reader& in) {
    TagSequence seq;
    seq.codes_ = IntVector::load(in);
    auto const rows = in.get<std::uint64_t>();
    if (rows == 0 || rows > (std::uint64_t{1} << 32)) throw FormatError("tag sequence: bad row count");
    for (std::uint64_t i = 0; i < rows; ++i) {
        seq.rows_.push_back(SparseBitSequence::load(in));
        if (seq.rows_.back().universe() != seq.codes_.size()) throw FormatError("tag sequence: bad row");
    }
    return seq;
}

// ---------------------------------------------------------------- TreeIndex

TreeIndex::TreeIndex(DocumentModel const& model)
    : tags_(model.tags),
      par_(BitVector(model.par_bits)),
      tag_seq_(model.tag_codes, static_cast<std::uint32_t>(2 * model.tags.size())),
      leaves_(model.leaf_marks) {}

TreeIndex::TreeIndex(TagDictionary tags, BalancedParens par, TagSequence tag_seq, BitVector leaves)
    : tags_(std::move(tags)), par_(std::move(par)), tag_seq_(std::move(tag_seq)), leaves_(std::move(leaves)) {
    if (tag_seq_.size() != par_.size() || leaves_.size() != par_.size() || par_.size() < 2 ||
        tag_seq_.max_code() != 2 * tags_.size())
        throw FormatError("tree index: inconsistent sections");
}

void TreeIndex::check_node(Node x) const {
    if (x >= par_.size() || !par_.is_open(x)) throw std::out_of_range("not a node");
}

Node TreeIndex::next_sibling(Node x) const {
    std::size_t const p = close(x) + 1;
    return p < par_.size() && par_.is_open(p) ? p : kNoNode;
}

std::size_t TreeIndex::subtree_tags(Node x, TagId t) const {
    return tag_seq_.rank(t, close(x) + 1) - tag_seq_.rank(t, x);
}

Node TreeIndex::tagged_desc(Node x, TagId t) const {
    std::size_t const y = tag_seq_.select(t, tag_seq_.rank(t, x + 1) + 1);
    return y != npos && y <= close(x) ? y : kNoNode;
}

Node TreeIndex::tagged_foll(Node x, TagId t) const {
    std::size_t const y = tag_seq_.select(t, tag_seq_.rank(t, close(x) + 1) + 1);
    return y;
}

Node TreeIndex::tagged_prec(Node x, TagId t) const {
    for (std::size_t r = tag_seq_.rank(t, x); r > 0; --r) {
        std::size_t const y = tag_seq_.select(t, r);
        if (close(y) < x) return y;
    }
    return kNoNode;
}

Node TreeIndex::tagged_in(std::size_t begin, std::size_t end, TagId t) const {
    if (begin >= end) return kNoNode;
    std::size_t const y = tag_seq_.select(t, tag_seq_.rank(t, begin) + 1);
    return y < end ? y : kNoNode;
}

IdRange TreeIndex::text_ids(Node x) const {
    return {static_cast<TextId>(leaves_.rank1(x) + 1), static_cast<TextId>(leaves_.rank1(close(x) + 1))};
}

std::string TreeIndex::get_text(TextSource const& texts, TextId id) const {
    if (id < 1 || id > text_count()) throw std::out_of_range("text id out of range");
    return texts.extract_text(id);
}

void append_escaped(std::string& out, std::string_view s, bool attribute) {
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"':
            if (attribute) out += "&quot;";
            else out += c;
            break;
        default: out += c;
        }
    }
}

std::string TreeIndex::get_subtree(TextSource const& texts, Node x) const {
    check_node(x);
    std::string out;
    auto const t = static_cast<std::uint32_t>(tags_.size());

    // Renders the attribute name node a (tag "@k") as ` k="v"`.
    auto attribute = [&](Node a) {
        out += ' ';
        out += tags_.xml_name(tag(a));
        out += "=\"";
        if (Node v = first_child(a); v != kNoNode && tag(v) == kAttrValueTag)
            append_escaped(out, texts.extract_text(text_id(v)), true);
        out += '"';
    };
    auto text = [&](Node leaf, bool in_attribute) {
        if (TextId id = text_id(leaf)) append_escaped(out, texts.extract_text(id), in_attribute);
    };

    TagId const top = tag(x);
    if (top == kAttributesTag) {
        for (Node a = first_child(x); a != kNoNode; a = next_sibling(a)) attribute(a);
        return out;
    }
    if (tags_.is_attribute_name(top)) {
        attribute(x);
        return out;
    }
    if (top == kAttrValueTag) {
        text(x, true);
        return out;
    }

    std::size_t const end = close(x);
    std::size_t p = x;
    while (p <= end) {
        if (!par_.is_open(p)) {
            TagId const closing = tag_seq_[p] - t;
            if (tags_.is_element(closing)) {
                out += "</";
                out += tags_.name(closing);
                out += '>';
            }
            ++p;
            continue;
        }
        TagId const id = tag(p);
        if (id == kRootTag) {
            ++p;
        } else if (id == kTextTag) {
            text(p, false);
            p = close(p) + 1;
        } else if (id == kAttributesTag || tags_.is_attribute_name(id) || id == kAttrValueTag) {
            p = close(p) + 1;  // rendered with the owning element
        } else {
            out += '<';
            out += tags_.name(id);
            std::size_t q = p + 1;
            if (par_.is_open(q) && tag(q) == kAttributesTag) {
                for (Node a = first_child(q); a != kNoNode; a = next_sibling(a)) attribute(a);
                q = close(q) + 1;
            }
            if (!par_.is_open(q)) {
                out += "/>";
                p = q + 1;
            } else {
                out += '>';
                p = q;
            }
        }
    }
    return out;
}

}  // namespace sxsi
