#include "sxsi/xpath.hpp"

#include <cctype>

namespace sxsi {

namespace {

enum class Tok { End, Slash, DoubleSlash, ColonColon, LBracket, RBracket, LParen, RParen, Comma, Equals, Dot, DotDot,
                 Star, At, Name, String, Number, Other };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::size_t offset = 0;
};

bool name_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool name_char(unsigned char c) { return std::isalnum(c) || c == '_' || c == '-' || c == '.' || c >= 0x80; }

std::vector<Token> lex(std::string_view s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (true) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        Token t;
        t.offset = i;
        if (i >= s.size()) {
            out.push_back(t);
            return out;
        }
        char const c = s[i];
        auto two = [&](char a, char b) { return c == a && i + 1 < s.size() && s[i + 1] == b; };
        if (two('/', '/')) t.kind = Tok::DoubleSlash, i += 2;
        else if (two(':', ':')) t.kind = Tok::ColonColon, i += 2;
        else if (two('.', '.')) t.kind = Tok::DotDot, i += 2;
        else if (c == '.' && !(i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) t.kind = Tok::Dot, ++i;
        else if (c == '/') t.kind = Tok::Slash, ++i;
        else if (c == '[') t.kind = Tok::LBracket, ++i;
        else if (c == ']') t.kind = Tok::RBracket, ++i;
        else if (c == '(') t.kind = Tok::LParen, ++i;
        else if (c == ')') t.kind = Tok::RParen, ++i;
        else if (c == ',') t.kind = Tok::Comma, ++i;
        else if (c == '=') t.kind = Tok::Equals, ++i;
        else if (c == '*') t.kind = Tok::Star, ++i;
        else if (c == '@') t.kind = Tok::At, ++i;
        else if (c == '"' || c == '\'') {
            std::size_t const end = s.find(c, i + 1);
            if (end == std::string_view::npos) throw ParseError("unterminated string literal", i);
            t.kind = Tok::String;
            t.text = std::string(s.substr(i + 1, end - i - 1));
            i = end + 1;
        } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            t.kind = Tok::Number;
            while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) t.text += s[i++];
        } else if (name_start(static_cast<unsigned char>(c))) {
            t.kind = Tok::Name;
            while (i < s.size()) {
                auto const ch = static_cast<unsigned char>(s[i]);
                // A single ':' belongs to a prefixed name, '::' ends it.
                bool const colon = ch == ':' && !(i + 1 < s.size() && s[i + 1] == ':') && i + 1 < s.size() &&
                                   name_start(static_cast<unsigned char>(s[i + 1]));
                if (!name_char(ch) && !colon) break;
                t.text += s[i++];
            }
        } else {
            t.kind = Tok::Other;
            t.text = std::string(1, c);
            if ((c == '!' || c == '<' || c == '>') && i + 1 < s.size() && s[i + 1] == '=') t.text += '=';
            i += t.text.size();
        }
        out.push_back(std::move(t));
    }
}

class Parser {
public:
    explicit Parser(std::string_view q) : tokens_(lex(q)) {}

    LocationPath run() {
        LocationPath path;
        if (at(Tok::Slash)) {
            next();
            path.absolute = true;
            if (at(Tok::End)) return path;
            relative_path(path, false);
        } else if (at(Tok::DoubleSlash)) {
            next();
            path.absolute = true;
            relative_path(path, true);
        } else {
            relative_path(path, false);
        }
        if (!at(Tok::End)) fail("unexpected '" + describe(peek()) + "'");
        return path;
    }

private:
    Token const& peek(std::size_t k = 0) const { return tokens_[std::min(pos_ + k, tokens_.size() - 1)]; }
    bool at(Tok kind, std::size_t k = 0) const { return peek(k).kind == kind; }
    bool at_name(std::string_view name, std::size_t k = 0) const { return at(Tok::Name, k) && peek(k).text == name; }
    Token next() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void fail(std::string const& what) const { throw ParseError("XPath: " + what, peek().offset); }

    static std::string describe(Token const& t) {
        switch (t.kind) {
        case Tok::End: return "end of query";
        case Tok::Name:
        case Tok::Number:
        case Tok::Other: return t.text;
        case Tok::String: return "\"" + t.text + "\"";
        default: return "punctuation";
        }
    }

    void expect(Tok kind, char const* what) {
        if (!at(kind)) fail(std::string("expected ") + what);
        next();
    }

    void relative_path(LocationPath& path, bool after_double_slash) {
        for (;;) {
            Step s = step();
            if (after_double_slash) {
                if (s.axis == Axis::Child) {
                    s.axis = Axis::Descendant;
                } else {
                    path.steps.push_back(Step{Axis::DescendantOrSelf, NodeTest{}, {}});
                }
            }
            path.steps.push_back(std::move(s));
            if (at(Tok::Slash)) {
                next();
                after_double_slash = false;
            } else if (at(Tok::DoubleSlash)) {
                next();
                after_double_slash = true;
            } else {
                return;
            }
        }
    }

    Step step() {
        Step s;
        if (at(Tok::Dot)) {
            next();
            s.axis = Axis::Self;
            return s;
        }
        if (at(Tok::DotDot)) throw UnsupportedError("parent axis (..)");
        if (at(Tok::At)) throw UnsupportedError("attribute axis (@)");
        if (at(Tok::Name) && at(Tok::ColonColon, 1)) {
            std::string const axis = next().text;
            next();
            if (axis == "child") s.axis = Axis::Child;
            else if (axis == "descendant") s.axis = Axis::Descendant;
            else if (axis == "descendant-or-self") s.axis = Axis::DescendantOrSelf;
            else if (axis == "self") s.axis = Axis::Self;
            else if (axis == "following-sibling") s.axis = Axis::FollowingSibling;
            else if (axis == "parent" || axis == "ancestor" || axis == "ancestor-or-self" || axis == "preceding" ||
                     axis == "preceding-sibling" || axis == "following" || axis == "attribute" || axis == "namespace")
                throw UnsupportedError(axis + " axis");
            else fail("unknown axis '" + axis + "'");
        }
        s.test = node_test();
        while (at(Tok::LBracket)) {
            next();
            s.predicates.push_back(or_expr());
            expect(Tok::RBracket, "']'");
        }
        return s;
    }

    NodeTest node_test() {
        NodeTest t;
        if (at(Tok::Star)) {
            next();
            t.kind = NodeTest::Kind::Star;
            return t;
        }
        if (!at(Tok::Name)) fail("expected a node test, found '" + describe(peek()) + "'");
        std::string const name = next().text;
        if (at(Tok::LParen)) {
            if (name == "text" || name == "node") {
                next();
                expect(Tok::RParen, "')'");
                t.kind = name == "text" ? NodeTest::Kind::Text : NodeTest::Kind::Node;
                return t;
            }
            throw UnsupportedError(name + "()");
        }
        t.kind = NodeTest::Kind::Name;
        t.name = name;
        return t;
    }

    std::shared_ptr<Expr const> or_expr() {
        auto left = and_expr();
        while (at_name("or")) {
            next();
            auto e = std::make_shared<Expr>();
            e->kind = Expr::Kind::Or;
            e->operands = {left, and_expr()};
            left = e;
        }
        return left;
    }

    std::shared_ptr<Expr const> and_expr() {
        auto left = unary();
        while (at_name("and")) {
            next();
            auto e = std::make_shared<Expr>();
            e->kind = Expr::Kind::And;
            e->operands = {left, unary()};
            left = e;
        }
        return left;
    }

    struct Arg {
        bool is_literal = false;
        std::string literal;
        LocationPath path;
    };

    Arg argument() {
        Arg a;
        if (at(Tok::String)) {
            a.is_literal = true;
            a.literal = next().text;
        } else {
            a.path = predicate_path();
        }
        return a;
    }

    LocationPath predicate_path() {
        if (at(Tok::Slash) || at(Tok::DoubleSlash)) throw UnsupportedError("absolute path inside a predicate");
        if (at(Tok::Number)) throw UnsupportedError("positional predicate");
        LocationPath p;
        relative_path(p, false);
        return p;
    }

    std::shared_ptr<Expr const> compare(Comparison kind, LocationPath path, std::string literal) {
        auto e = std::make_shared<Expr>();
        e->kind = Expr::Kind::Compare;
        e->comparison = kind;
        e->path = std::move(path);
        e->literal = std::move(literal);
        return e;
    }

    void reject_operator() {
        if (at(Tok::Other)) throw UnsupportedError("operator " + peek().text);
    }

    std::shared_ptr<Expr const> unary() {
        if (at(Tok::LParen)) {
            next();
            auto e = or_expr();
            expect(Tok::RParen, "')'");
            return e;
        }
        if (at(Tok::Name) && at(Tok::LParen, 1)) {
            std::string const fn = peek().text;
            if (fn == "not") {
                next();
                next();
                auto e = std::make_shared<Expr>();
                e->kind = Expr::Kind::Not;
                e->operands = {or_expr()};
                expect(Tok::RParen, "')'");
                return e;
            }
            if (fn == "contains" || fn == "starts-with") {
                next();
                next();
                Arg a = argument();
                expect(Tok::Comma, "','");
                Arg b = argument();
                expect(Tok::RParen, "')'");
                if (a.is_literal == b.is_literal) throw UnsupportedError(fn + "() needs one path and one string literal");
                if (fn == "starts-with" && a.is_literal) throw UnsupportedError("starts-with() with a literal first argument");
                Comparison const kind = fn == "contains" ? Comparison::Contains : Comparison::StartsWith;
                return a.is_literal ? compare(kind, std::move(b.path), std::move(a.literal))
                                    : compare(kind, std::move(a.path), std::move(b.literal));
            }
            if (fn != "text" && fn != "node") throw UnsupportedError(fn + "()");
        }
        if (at(Tok::String)) {
            std::string literal = next().text;
            reject_operator();
            expect(Tok::Equals, "'=' after a string literal");
            return compare(Comparison::Equals, predicate_path(), std::move(literal));
        }
        if (at(Tok::Number)) throw UnsupportedError("positional predicate");
        LocationPath path = predicate_path();
        reject_operator();
        if (at(Tok::Equals)) {
            next();
            if (!at(Tok::String)) throw UnsupportedError("comparison with a non-literal operand");
            return compare(Comparison::Equals, std::move(path), next().text);
        }
        auto e = std::make_shared<Expr>();
        e->kind = Expr::Kind::Path;
        e->path = std::move(path);
        return e;
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

std::string axis_name(Axis a) {
    switch (a) {
    case Axis::Child: return "child";
    case Axis::Descendant: return "descendant";
    case Axis::DescendantOrSelf: return "descendant-or-self";
    case Axis::Self: return "self";
    case Axis::FollowingSibling: return "following-sibling";
    }
    return "?";
}

std::string test_name(NodeTest const& t) {
    switch (t.kind) {
    case NodeTest::Kind::Name: return t.name;
    case NodeTest::Kind::Star: return "*";
    case NodeTest::Kind::Text: return "text()";
    case NodeTest::Kind::Node: return "node()";
    }
    return "?";
}

}  // namespace

LocationPath parse_xpath(std::string_view query) { return Parser(query).run(); }

std::string to_string(LocationPath const& path) {
    std::string out = path.absolute ? "/" : "";
    for (std::size_t i = 0; i < path.steps.size(); ++i) {
        auto const& s = path.steps[i];
        if (i > 0) out += '/';
        out += axis_name(s.axis) + "::" + test_name(s.test);
        for (auto const& p : s.predicates) out += "[" + to_string(*p) + "]";
    }
    return out;
}

std::string to_string(Expr const& e) {
    switch (e.kind) {
    case Expr::Kind::And: return "(" + to_string(*e.operands[0]) + " and " + to_string(*e.operands[1]) + ")";
    case Expr::Kind::Or: return "(" + to_string(*e.operands[0]) + " or " + to_string(*e.operands[1]) + ")";
    case Expr::Kind::Not: return "not(" + to_string(*e.operands[0]) + ")";
    case Expr::Kind::Path: return to_string(e.path);
    case Expr::Kind::Compare:
        switch (e.comparison) {
        case Comparison::Equals: return to_string(e.path) + " = \"" + e.literal + "\"";
        case Comparison::Contains: return "contains(" + to_string(e.path) + ", \"" + e.literal + "\")";
        case Comparison::StartsWith: return "starts-with(" + to_string(e.path) + ", \"" + e.literal + "\")";
        }
    }
    return "?";
}

}  // namespace sxsi
