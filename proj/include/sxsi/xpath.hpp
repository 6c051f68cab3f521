#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sxsi/document.hpp"

namespace sxsi {

/// Query uses a construct outside the supported fragment.
class UnsupportedError : public std::runtime_error {
public:
    explicit UnsupportedError(std::string construct)
        : std::runtime_error("unsupported XPath construct: " + construct), construct_(std::move(construct)) {}
    std::string const& construct() const { return construct_; }

private:
    std::string construct_;
};

enum class Axis { Child, Descendant, DescendantOrSelf, Self, FollowingSibling };

struct NodeTest {
    enum class Kind { Name, Star, Text, Node };
    Kind kind = Kind::Node;
    std::string name;

    friend bool operator==(NodeTest const&, NodeTest const&) = default;
};

struct Expr;

struct Step {
    Axis axis = Axis::Child;
    NodeTest test;
    std::vector<std::shared_ptr<Expr const>> predicates;
};

struct LocationPath {
    bool absolute = false;
    std::vector<Step> steps;
};

enum class Comparison { Equals, Contains, StartsWith };

struct Expr {
    enum class Kind { And, Or, Not, Path, Compare };
    Kind kind = Kind::Path;
    std::vector<std::shared_ptr<Expr const>> operands;  // And, Or, Not
    LocationPath path;                                   // Path, Compare
    Comparison comparison = Comparison::Equals;          // Compare
    std::string literal;                                 // Compare
};

LocationPath parse_xpath(std::string_view query);

/// Readable rendering of an AST, with abbreviations expanded.
std::string to_string(LocationPath const& path);
std::string to_string(Expr const& expr);

}  // namespace sxsi
