#include "sxsi/document.hpp"

#include <algorithm>

namespace sxsi {

// ---------------------------------------------------------------- TagDictionary

TagDictionary::TagDictionary() {
    for (char const* reserved : {"&", "#", "@", "%"}) intern(reserved);
}

TagId TagDictionary::intern(std::string_view name) {
    std::string key(name);
    if (auto it = ids_.find(key); it != ids_.end()) return it->second;
    names_.push_back(key);
    auto const id = static_cast<TagId>(names_.size());
    ids_.emplace(std::move(key), id);
    return id;
}

std::optional<TagId> TagDictionary::find(std::string_view name) const {
    if (auto it = ids_.find(std::string(name)); it != ids_.end()) return it->second;
    return std::nullopt;
}

std::optional<TagId> TagDictionary::find_element(std::string_view name) const {
    auto id = find(name);
    if (id && is_element(*id)) return id;
    return std::nullopt;
}

std::string_view TagDictionary::xml_name(TagId id) const {
    std::string_view n = name(id);
    if (is_attribute_name(id)) n.remove_prefix(1);
    return n;
}

bool TagDictionary::is_attribute_name(TagId id) const {
    auto const& n = name(id);
    return n.size() > 1 && n.front() == '@';
}

void TagDictionary::save(Writer& out) const {
    out.put<std::uint64_t>(names_.size());
    for (auto const& n : names_) out.put_string(n);
}

TagDictionary TagDictionary::load(Reader& in) {
    TagDictionary dict;
    auto const count = in.get<std::uint64_t>();
    for (std::uint64_t i = 0; i < count; ++i) {
        auto const name = in.get_string();
        if (i < dict.size()) {
            if (dict.names_[i] != name) throw FormatError("tag dictionary: reserved names out of order");
            continue;
        }
        if (dict.intern(name) != i + 1) throw FormatError("tag dictionary: duplicate name");
    }
    return dict;
}

// ---------------------------------------------------------------- parser

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

bool is_name_char(char c) {
    return !is_space(c) && c != '/' && c != '>' && c != '=' && c != '<' && c != '"' && c != '\'' && c != '\0';
}

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

class Parser {
public:
    Parser(std::string_view xml, ParseOptions const& options) : in_(xml), options_(options) {}

    DocumentModel run() {
        if (in_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
        open(kRootTag, false);
        bool seen_root = false;
        while (pos_ < in_.size()) {
            if (in_[pos_] != '<') {
                std::size_t const start = pos_;
                read_char_data();
                if (stack_.empty()) {
                    bool const blank = std::all_of(text_.begin(), text_.end(), is_space);
                    text_.clear();
                    if (!blank) throw ParseError("character data outside the root element", start);
                }
                continue;
            }
            if (starts_with("<!--")) {
                skip_past("-->", "unterminated comment");
            } else if (starts_with("<![CDATA[")) {
                if (stack_.empty()) throw ParseError("CDATA outside the root element", pos_);
                std::size_t const begin = pos_ + 9;
                std::size_t const end = in_.find("]]>", begin);
                if (end == std::string_view::npos) throw ParseError("unterminated CDATA section", pos_);
                check_no_nul(in_.substr(begin, end - begin), begin);
                text_.append(in_.substr(begin, end - begin));
                pos_ = end + 3;
            } else if (starts_with("<?")) {
                skip_past("?>", "unterminated processing instruction");
            } else if (starts_with("<!")) {
                skip_declaration();
            } else if (starts_with("</")) {
                close_element();
            } else {
                if (stack_.empty() && seen_root) throw ParseError("more than one root element", pos_);
                seen_root = true;
                open_element();
            }
        }
        if (!stack_.empty()) throw ParseError("unclosed element <" + model_.tags.name(stack_.back()) + ">", pos_);
        if (!seen_root) throw ParseError("no root element", pos_);
        close(kRootTag);

        auto const t = static_cast<std::uint32_t>(model_.tags.size());
        for (std::size_t i = 0; i < model_.tag_codes.size(); ++i)
            if (!model_.par_bits[i]) model_.tag_codes[i] += t;
        return std::move(model_);
    }

private:
    bool starts_with(std::string_view s) const { return in_.substr(pos_, s.size()) == s; }

    void skip_past(std::string_view terminator, char const* error) {
        std::size_t const end = in_.find(terminator, pos_);
        if (end == std::string_view::npos) throw ParseError(error, pos_);
        pos_ = end + terminator.size();
    }

    void skip_declaration() {
        std::size_t const start = pos_;
        int depth = 0;
        for (; pos_ < in_.size(); ++pos_) {
            char const c = in_[pos_];
            if (c == '[') ++depth;
            else if (c == ']') --depth;
            else if (c == '>' && depth <= 0) {
                ++pos_;
                return;
            }
        }
        throw ParseError("unterminated declaration", start);
    }

    void check_no_nul(std::string_view s, std::size_t offset) const {
        if (auto p = s.find('\0'); p != std::string_view::npos)
            throw InvalidInput("NUL byte in character data at byte " + std::to_string(offset + p));
    }

    void decode_entity(std::string& out) {
        std::size_t const start = pos_;
        std::size_t const semi = in_.find(';', pos_);
        if (semi == std::string_view::npos || semi - pos_ > 12) throw ParseError("malformed entity reference", start);
        std::string_view const ref = in_.substr(pos_ + 1, semi - pos_ - 1);
        pos_ = semi + 1;
        if (ref == "lt") out += '<';
        else if (ref == "gt") out += '>';
        else if (ref == "amp") out += '&';
        else if (ref == "quot") out += '"';
        else if (ref == "apos") out += '\'';
        else if (ref.size() > 1 && ref[0] == '#') {
            std::uint32_t cp = 0;
            bool const hex = ref[1] == 'x' || ref[1] == 'X';
            std::string_view digits = ref.substr(hex ? 2 : 1);
            if (digits.empty()) throw ParseError("empty character reference", start);
            for (char c : digits) {
                int v;
                if (c >= '0' && c <= '9') v = c - '0';
                else if (hex && c >= 'a' && c <= 'f') v = c - 'a' + 10;
                else if (hex && c >= 'A' && c <= 'F') v = c - 'A' + 10;
                else throw ParseError("bad character reference", start);
                cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(v);
                if (cp > 0x10FFFF) throw ParseError("character reference out of range", start);
            }
            if (cp == 0) throw InvalidInput("character reference to NUL at byte " + std::to_string(start));
            append_utf8(out, cp);
        } else {
            throw ParseError("unknown entity '&" + std::string(ref) + ";'", start);
        }
    }

    void read_char_data() {
        while (pos_ < in_.size() && in_[pos_] != '<') {
            char const c = in_[pos_];
            if (c == '&') {
                decode_entity(text_);
            } else {
                if (c == '\0') throw InvalidInput("NUL byte in character data at byte " + std::to_string(pos_));
                text_ += c;
                ++pos_;
            }
        }
    }

    std::string_view read_name() {
        std::size_t const start = pos_;
        while (pos_ < in_.size() && is_name_char(in_[pos_])) ++pos_;
        if (pos_ == start) throw ParseError("expected a name", start);
        return in_.substr(start, pos_ - start);
    }

    void skip_spaces() {
        while (pos_ < in_.size() && is_space(in_[pos_])) ++pos_;
    }

    void expect(char c) {
        if (pos_ >= in_.size() || in_[pos_] != c) throw ParseError(std::string("expected '") + c + "'", pos_);
        ++pos_;
    }

    void open_element() {
        flush_text();
        ++pos_;  // '<'
        std::string_view const name = read_name();
        if (name.front() == '@' || name == "&" || name == "#" || name == "%")
            throw ParseError("invalid element name '" + std::string(name) + "'", pos_ - name.size());
        TagId const id = model_.tags.intern(name);

        std::vector<std::pair<std::string_view, std::string>> attributes;
        for (;;) {
            std::size_t const before = pos_;
            skip_spaces();
            if (pos_ >= in_.size()) throw ParseError("unterminated start tag", before);
            if (in_[pos_] == '>' || in_[pos_] == '/') break;
            if (pos_ == before) throw ParseError("expected whitespace before attribute", pos_);
            std::size_t const name_at = pos_;
            std::string_view const attr = read_name();
            for (auto const& [seen, _] : attributes)
                if (seen == attr) throw ParseError("duplicate attribute '" + std::string(attr) + "'", name_at);
            skip_spaces();
            expect('=');
            skip_spaces();
            if (pos_ >= in_.size() || (in_[pos_] != '"' && in_[pos_] != '\''))
                throw ParseError("expected quoted attribute value", pos_);
            char const quote = in_[pos_++];
            std::string value;
            while (pos_ < in_.size() && in_[pos_] != quote) {
                if (in_[pos_] == '<') throw ParseError("'<' in attribute value", pos_);
                if (in_[pos_] == '&') {
                    decode_entity(value);
                } else {
                    if (in_[pos_] == '\0') throw InvalidInput("NUL byte in attribute value at byte " + std::to_string(pos_));
                    value += in_[pos_++];
                }
            }
            if (pos_ >= in_.size()) throw ParseError("unterminated attribute value", name_at);
            ++pos_;
            attributes.emplace_back(attr, std::move(value));
        }

        open(id, false);
        if (!attributes.empty()) {
            open(kAttributesTag, false);
            for (auto& [attr, value] : attributes) {
                TagId const attr_id = model_.tags.intern_attribute(attr);
                open(attr_id, false);
                if (!value.empty()) {
                    open(kAttrValueTag, true);
                    model_.texts.push_back(std::move(value));
                    close(kAttrValueTag);
                }
                close(attr_id);
            }
            close(kAttributesTag);
        }

        if (in_[pos_] == '/') {
            ++pos_;
            expect('>');
            close(id);
        } else {
            ++pos_;
            stack_.push_back(id);
        }
    }

    void close_element() {
        std::size_t const start = pos_;
        flush_text();
        pos_ += 2;
        std::string_view const name = read_name();
        skip_spaces();
        expect('>');
        if (stack_.empty() || model_.tags.name(stack_.back()) != name)
            throw ParseError("mismatched end tag </" + std::string(name) + ">", start);
        close(stack_.back());
        stack_.pop_back();
    }

    void flush_text() {
        if (text_.empty()) return;
        bool const blank = std::all_of(text_.begin(), text_.end(), is_space);
        if (!blank || options_.keep_whitespace) {
            open(kTextTag, true);
            model_.texts.push_back(std::move(text_));
            close(kTextTag);
        }
        text_.clear();
    }

    void open(TagId id, bool leaf) {
        model_.par_bits.push_back(true);
        model_.tag_codes.push_back(id);
        model_.leaf_marks.push_back(leaf);
    }

    void close(TagId id) {
        model_.par_bits.push_back(false);
        model_.tag_codes.push_back(id);
        model_.leaf_marks.push_back(false);
    }

    std::string_view in_;
    ParseOptions options_;
    std::size_t pos_ = 0;
    DocumentModel model_;
    std::vector<TagId> stack_;
    std::string text_;
};

}  // namespace

DocumentModel parse_document(std::string_view xml, ParseOptions const& options) {
    return Parser(xml, options).run();
}

}  // namespace sxsi
