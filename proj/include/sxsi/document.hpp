#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sxsi/serialize.hpp"

namespace sxsi {

/// Tag identifier in [1, t]. Opening code = id, closing code = id + t.
using TagId = std::uint32_t;

inline constexpr TagId kRootTag = 1;       // "&"  dummy root
inline constexpr TagId kTextTag = 2;       // "#"  text leaf
inline constexpr TagId kAttributesTag = 3; // "@"  attribute container
inline constexpr TagId kAttrValueTag = 4;  // "%"  attribute value leaf

/// Malformed XML. Carries the byte offset where parsing stopped.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string const& what, std::size_t offset)
        : std::runtime_error(what + " at byte " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Well-formed input the model cannot represent (e.g. a NUL byte in text).
class InvalidInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bijection between tag names and identifiers, in first-seen order.
///
/// Attribute names live in their own namespace: they are stored with a leading
/// '@' so that `<k/>` and `k="v"` get distinct identifiers.
class TagDictionary {
public:
    TagDictionary();

    TagId intern(std::string_view name);
    TagId intern_attribute(std::string_view name) { return intern("@" + std::string(name)); }

    std::optional<TagId> find(std::string_view name) const;
    std::optional<TagId> find_element(std::string_view name) const;

    std::string const& name(TagId id) const { return names_.at(id - 1); }
    /// Name as written in XML (attribute prefix stripped).
    std::string_view xml_name(TagId id) const;

    bool is_reserved(TagId id) const { return id <= kAttrValueTag; }
    bool is_attribute_name(TagId id) const;
    bool is_element(TagId id) const { return !is_reserved(id) && !is_attribute_name(id); }

    std::size_t size() const { return names_.size(); }

    void save(Writer& out) const;
    static TagDictionary load(Reader& in);

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, TagId> ids_;
};

/// Raw sequences describing a document under the tree/text model.
struct DocumentModel {
    std::vector<bool> par_bits;        // true = open
    std::vector<std::uint32_t> tag_codes;  // aligned with par_bits
    std::vector<bool> leaf_marks;      // set on opens of text-bearing leaves
    std::vector<std::string> texts;    // text id i+1 is texts[i]
    TagDictionary tags;

    std::size_t node_count() const { return par_bits.size() / 2; }
    std::size_t text_count() const { return texts.size(); }
    std::size_t tag_count() const { return tags.size(); }
    std::uint32_t closing_code(TagId id) const { return id + static_cast<std::uint32_t>(tags.size()); }
};

struct ParseOptions {
    bool keep_whitespace = false;
};

DocumentModel parse_document(std::string_view xml, ParseOptions const& options = {});

}  // namespace sxsi
