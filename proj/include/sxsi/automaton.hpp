#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sxsi/document.hpp"
#include "sxsi/text_index.hpp"
#include "sxsi/xpath.hpp"

namespace sxsi {

using StateId = std::uint32_t;
inline constexpr std::size_t kMaxStates = 128;

/// Fixed-capacity set of automaton states; value semantics give O(1)
/// hashing and equality.
class StateSet {
public:
    bool empty() const { return (words_[0] | words_[1]) == 0; }
    bool contains(StateId q) const { return (words_[q / 64] >> (q % 64)) & 1; }
    void insert(StateId q) { words_[q / 64] |= std::uint64_t{1} << (q % 64); }
    void erase(StateId q) { words_[q / 64] &= ~(std::uint64_t{1} << (q % 64)); }
    std::size_t size() const { return std::popcount(words_[0]) + std::popcount(words_[1]); }

    StateSet& operator|=(StateSet const& o) {
        words_[0] |= o.words_[0];
        words_[1] |= o.words_[1];
        return *this;
    }
    StateSet operator&(StateSet const& o) const {
        StateSet s;
        s.words_ = {words_[0] & o.words_[0], words_[1] & o.words_[1]};
        return s;
    }
    bool subset_of(StateSet const& o) const { return (*this & o) == *this; }
    friend bool operator==(StateSet const&, StateSet const&) = default;

    template <typename F>
    void for_each(F&& f) const {
        for (unsigned w = 0; w < 2; ++w)
            for (std::uint64_t bits = words_[w]; bits; bits &= bits - 1)
                f(static_cast<StateId>(w * 64 + std::countr_zero(bits)));
    }

    std::size_t hash() const { return std::hash<std::uint64_t>{}(words_[0] * 0x9E3779B97F4A7C15ull ^ words_[1]); }

private:
    std::array<std::uint64_t, 2> words_{};
};

struct StateSetHash {
    std::size_t operator()(StateSet const& s) const { return s.hash(); }
};

/// Label set: either the listed tags or everything except them.
struct LabelSet {
    bool complement = false;
    std::vector<TagId> tags;  // sorted, unique

    bool contains(TagId t) const;
    friend bool operator==(LabelSet const&, LabelSet const&) = default;
};

using LabelSetId = std::uint32_t;
using FormulaId = std::uint32_t;
using PredId = std::uint32_t;

enum class Op : std::uint8_t { True, False, Or, And, Not, Down1, Down2, Mark, LabelIn, TextPred };

struct Formula {
    Op op = Op::False;
    std::uint32_t a = 0;  // operand formula, state, label set or predicate
    std::uint32_t b = 0;  // second operand for Or/And
    friend bool operator==(Formula const&, Formula const&) = default;
};

struct TextPredAtom {
    TextPredicate kind = TextPredicate::Equals;
    std::string literal;
    friend bool operator==(TextPredAtom const&, TextPredAtom const&) = default;
};

struct Transition {
    LabelSetId labels = 0;
    FormulaId formula = 0;
};

struct AutomatonState {
    std::vector<Transition> transitions;
    bool marking = false;
    // Derived by finish():
    bool jumpable = false;        // descendant-style state whose relevant labels are explicit
    bool sibling_loop = false;    // has (q, L) -> down2 q
    std::vector<TagId> jump_tags;  // union of the explicit relevant label sets
};

/// Alternating marking tree automaton over the first-child/next-sibling view.
class Automaton {
public:
    std::vector<AutomatonState> states;
    StateSet initial;

    LabelSet const& label_set(LabelSetId id) const { return label_sets_[id]; }
    Formula const& formula(FormulaId id) const { return formulas_[id]; }
    TextPredAtom const& predicate(PredId id) const { return predicates_[id]; }
    std::size_t label_set_count() const { return label_sets_.size(); }
    std::size_t formula_count() const { return formulas_.size(); }
    std::size_t predicate_count() const { return predicates_.size(); }

    /// O(1) membership test against the dictionary the automaton was compiled for.
    bool label_contains(LabelSetId id, TagId tag) const {
        auto const& bits = label_bits_[id];
        return tag < bits.size() ? bits[tag] : label_sets_[id].complement;
    }

    /// States under down1 / down2 anywhere in the formula.
    StateSet const& down1_states(FormulaId f) const { return down1_[f]; }
    StateSet const& down2_states(FormulaId f) const { return down2_[f]; }
    bool has_text_predicate(FormulaId f) const { return has_pred_[f]; }

    StateSet all_states() const;

    LabelSetId intern_labels(LabelSet set);
    FormulaId make(Formula f);
    FormulaId make_true() { return make({Op::True}); }
    FormulaId make_false() { return make({Op::False}); }
    FormulaId make_or(FormulaId x, FormulaId y);
    FormulaId make_and(FormulaId x, FormulaId y);
    FormulaId make_not(FormulaId x);
    PredId intern_predicate(TextPredAtom atom);
    StateId add_state(bool marking);
    void add_transition(StateId q, LabelSetId labels, FormulaId formula);

    /// Computes per-formula and per-state summaries; call after construction.
    void finish(std::size_t tag_count);

    std::string describe_labels(LabelSetId id, TagDictionary const& tags) const;
    std::string describe_formula(FormulaId id, TagDictionary const& tags) const;
    std::string describe(TagDictionary const& tags) const;

private:
    std::vector<LabelSet> label_sets_;
    std::vector<std::vector<bool>> label_bits_;
    std::vector<Formula> formulas_;
    std::vector<TextPredAtom> predicates_;
    std::vector<StateSet> down1_, down2_;
    std::vector<bool> has_pred_;
};

/// Translates a parsed query into an automaton for the given dictionary.
Automaton compile(LocationPath const& query, TagDictionary const& tags);

}  // namespace sxsi
