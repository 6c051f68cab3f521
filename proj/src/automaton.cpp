#include "sxsi/automaton.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace sxsi {

bool LabelSet::contains(TagId t) const {
    return std::binary_search(tags.begin(), tags.end(), t) != complement;
}

StateSet Automaton::all_states() const {
    StateSet s;
    for (StateId q = 0; q < states.size(); ++q) s.insert(q);
    return s;
}

LabelSetId Automaton::intern_labels(LabelSet set) {
    std::sort(set.tags.begin(), set.tags.end());
    set.tags.erase(std::unique(set.tags.begin(), set.tags.end()), set.tags.end());
    for (LabelSetId i = 0; i < label_sets_.size(); ++i)
        if (label_sets_[i] == set) return i;
    label_sets_.push_back(std::move(set));
    return static_cast<LabelSetId>(label_sets_.size() - 1);
}

FormulaId Automaton::make(Formula f) {
    // Hash-consing by linear probe is fine: query automata are tiny.
    for (FormulaId i = 0; i < formulas_.size(); ++i)
        if (formulas_[i] == f) return i;
    formulas_.push_back(f);
    return static_cast<FormulaId>(formulas_.size() - 1);
}

FormulaId Automaton::make_or(FormulaId x, FormulaId y) {
    if (formulas_[x].op == Op::False) return y;
    if (formulas_[y].op == Op::False) return x;
    if (x == y) return x;
    return make({Op::Or, x, y});
}

FormulaId Automaton::make_and(FormulaId x, FormulaId y) {
    if (formulas_[x].op == Op::True) return y;
    if (formulas_[y].op == Op::True) return x;
    if (formulas_[x].op == Op::False || formulas_[y].op == Op::False) return make_false();
    if (x == y) return x;
    return make({Op::And, x, y});
}

FormulaId Automaton::make_not(FormulaId x) {
    if (formulas_[x].op == Op::True) return make_false();
    if (formulas_[x].op == Op::False) return make_true();
    return make({Op::Not, x});
}

PredId Automaton::intern_predicate(TextPredAtom atom) {
    for (PredId i = 0; i < predicates_.size(); ++i)
        if (predicates_[i] == atom) return i;
    predicates_.push_back(std::move(atom));
    return static_cast<PredId>(predicates_.size() - 1);
}

StateId Automaton::add_state(bool marking) {
    if (states.size() >= kMaxStates) throw UnsupportedError("query needing more than 128 automaton states");
    states.emplace_back();
    states.back().marking = marking;
    return static_cast<StateId>(states.size() - 1);
}

void Automaton::add_transition(StateId q, LabelSetId labels, FormulaId formula) {
    states.at(q).transitions.push_back({labels, formula});
}

void Automaton::finish(std::size_t tag_count) {
    label_bits_.assign(label_sets_.size(), {});
    for (LabelSetId i = 0; i < label_sets_.size(); ++i) {
        auto& bits = label_bits_[i];
        bits.resize(tag_count + 1);
        for (TagId t = 0; t <= tag_count; ++t) bits[t] = label_sets_[i].contains(t);
    }

    // Operands always precede their parents, so one forward pass suffices.
    down1_.assign(formulas_.size(), {});
    down2_.assign(formulas_.size(), {});
    has_pred_.assign(formulas_.size(), false);
    for (FormulaId i = 0; i < formulas_.size(); ++i) {
        auto const& f = formulas_[i];
        switch (f.op) {
        case Op::Down1: down1_[i].insert(f.a); break;
        case Op::Down2: down2_[i].insert(f.a); break;
        case Op::TextPred: has_pred_[i] = true; break;
        case Op::And:
        case Op::Or:
            down1_[i] = down1_[f.a];
            down1_[i] |= down1_[f.b];
            down2_[i] = down2_[f.a];
            down2_[i] |= down2_[f.b];
            has_pred_[i] = has_pred_[f.a] || has_pred_[f.b];
            break;
        case Op::Not:
            down1_[i] = down1_[f.a];
            down2_[i] = down2_[f.a];
            has_pred_[i] = has_pred_[f.a];
            break;
        default: break;
        }
    }

    for (StateId q = 0; q < states.size(); ++q) {
        auto& s = states[q];
        bool loop1 = false, loop2 = false, explicit_rest = true;
        std::vector<TagId> jump;
        for (auto const& tr : s.transitions) {
            auto const& labels = label_sets_[tr.labels];
            auto const& f = formulas_[tr.formula];
            bool const all = labels.complement && labels.tags.empty();
            bool const not_attr_text =
                labels.complement && labels.tags == std::vector<TagId>{kTextTag, kAttributesTag};
            if (f.op == Op::Down2 && f.a == q && all) {
                loop2 = true;
            } else if (f.op == Op::Down1 && f.a == q && not_attr_text) {
                loop1 = true;
            } else if (!labels.complement && down2_[tr.formula].empty()) {
                jump.insert(jump.end(), labels.tags.begin(), labels.tags.end());
            } else {
                explicit_rest = false;
            }
        }
        std::sort(jump.begin(), jump.end());
        jump.erase(std::unique(jump.begin(), jump.end()), jump.end());
        s.sibling_loop = loop2;
        s.jumpable = loop1 && loop2 && explicit_rest;
        s.jump_tags = s.jumpable ? std::move(jump) : std::vector<TagId>{};
    }
}

std::string Automaton::describe_labels(LabelSetId id, TagDictionary const& tags) const {
    auto const& set = label_sets_[id];
    std::string out = set.complement ? "L" : "";
    if (set.complement && set.tags.empty()) return out;
    if (set.complement) out += "-";
    out += "{";
    for (std::size_t i = 0; i < set.tags.size(); ++i) {
        if (i) out += ",";
        out += set.tags[i] <= tags.size() ? tags.name(set.tags[i]) : std::to_string(set.tags[i]);
    }
    return out + "}";
}

std::string Automaton::describe_formula(FormulaId id, TagDictionary const& tags) const {
    auto const& f = formulas_[id];
    switch (f.op) {
    case Op::True: return "true";
    case Op::False: return "false";
    case Op::Or: return "(" + describe_formula(f.a, tags) + " or " + describe_formula(f.b, tags) + ")";
    case Op::And: return "(" + describe_formula(f.a, tags) + " and " + describe_formula(f.b, tags) + ")";
    case Op::Not: return "not " + describe_formula(f.a, tags);
    case Op::Down1: return "down1 q" + std::to_string(f.a);
    case Op::Down2: return "down2 q" + std::to_string(f.a);
    case Op::Mark: return "mark";
    case Op::LabelIn: return "label in " + describe_labels(f.a, tags);
    case Op::TextPred: {
        static char const* const names[] = {"starts-with", "ends-with", "equals", "contains"};
        auto const& p = predicates_[f.a];
        return std::string(names[static_cast<int>(p.kind)]) + "(\"" + p.literal + "\")";
    }
    }
    return "?";
}

std::string Automaton::describe(TagDictionary const& tags) const {
    std::string out = "initial:";
    initial.for_each([&](StateId q) { out += " q" + std::to_string(q); });
    out += "\n";
    for (StateId q = 0; q < states.size(); ++q)
        for (auto const& tr : states[q].transitions)
            out += "q" + std::to_string(q) + (states[q].marking ? "*" : "") + ", " + describe_labels(tr.labels, tags) +
                   " -> " + describe_formula(tr.formula, tags) + "\n";
    return out;
}

// ---------------------------------------------------------------- compile

namespace {

enum class StateKind { Child, Descendant, Sibling, Value };

class Compiler {
public:
    Compiler(Automaton& a, TagDictionary const& tags) : a_(a), tags_(tags) {
        for (TagId t = 1; t <= tags.size(); ++t)
            if (tags.is_attribute_name(t)) attribute_names_.push_back(t);
        all_ = a_.intern_labels({true, {}});
        not_attr_text_ = a_.intern_labels({true, {kTextTag, kAttributesTag}});
        text_ = a_.intern_labels({false, {kTextTag}});
    }

    void run(LocationPath const& path) {
        FormulaId const entry = steps(path.steps, 0, a_.make({Op::Mark}), true);
        auto const& f = a_.formula(entry);
        if (f.op == Op::Down1 && kinds_[f.a] == StateKind::Descendant &&
            !a_.label_set(a_.states[f.a].transitions[0].labels).contains(kRootTag)) {
            // The descendant state can start at the root itself.
            a_.initial.insert(f.a);
        } else {
            StateId const q = a_.add_state(true);
            kinds_.push_back(StateKind::Child);
            a_.add_transition(q, all_, entry);
            a_.initial.insert(q);
        }
    }

private:
    LabelSetId labels(NodeTest const& test) {
        switch (test.kind) {
        case NodeTest::Kind::Name: {
            auto const id = tags_.find_element(test.name);
            return a_.intern_labels({false, id ? std::vector<TagId>{*id} : std::vector<TagId>{}});
        }
        case NodeTest::Kind::Star: {
            auto excluded = attribute_names_;
            excluded.insert(excluded.end(), {kRootTag, kTextTag, kAttributesTag, kAttrValueTag});
            return a_.intern_labels({true, excluded});
        }
        case NodeTest::Kind::Text: return text_;
        case NodeTest::Kind::Node: {
            auto excluded = attribute_names_;
            excluded.insert(excluded.end(), {kAttributesTag, kAttrValueTag});
            return a_.intern_labels({true, excluded});
        }
        }
        return all_;
    }

    StateId state(StateKind kind, bool marking) {
        StateId const q = a_.add_state(marking);
        kinds_.push_back(kind);
        return q;
    }

    FormulaId steps(std::vector<Step> const& path, std::size_t i, FormulaId last, bool marking) {
        if (i == path.size()) return last;
        Step const& s = path[i];
        FormulaId match = steps(path, i + 1, last, marking);
        for (auto it = s.predicates.rbegin(); it != s.predicates.rend(); ++it) match = a_.make_and(expr(**it), match);
        LabelSetId const t = labels(s.test);

        switch (s.axis) {
        case Axis::Child: {
            StateId const q = state(StateKind::Child, marking);
            a_.add_transition(q, t, match);
            a_.add_transition(q, all_, a_.make({Op::Down2, q}));
            return a_.make({Op::Down1, q});
        }
        case Axis::Descendant: return a_.make({Op::Down1, descendant(t, match, marking)});
        case Axis::FollowingSibling: {
            StateId const q = state(StateKind::Sibling, marking);
            a_.add_transition(q, t, match);
            a_.add_transition(q, all_, a_.make({Op::Down2, q}));
            return a_.make({Op::Down2, q});
        }
        case Axis::Self:
            // Every node a run can stand on passes node().
            if (s.test.kind == NodeTest::Kind::Node) return match;
            return a_.make_and(a_.make({Op::LabelIn, t}), match);
        case Axis::DescendantOrSelf: {
            FormulaId const self =
                s.test.kind == NodeTest::Kind::Node ? match : a_.make_and(a_.make({Op::LabelIn, t}), match);
            return a_.make_or(self, a_.make({Op::Down1, descendant(t, match, marking)}));
        }
        }
        return a_.make_false();
    }

    StateId descendant(LabelSetId t, FormulaId match, bool marking) {
        StateId const q = state(StateKind::Descendant, marking);
        a_.add_transition(q, t, match);
        a_.add_transition(q, not_attr_text_, a_.make({Op::Down1, q}));
        a_.add_transition(q, all_, a_.make({Op::Down2, q}));
        return q;
    }

    FormulaId expr(Expr const& e) {
        switch (e.kind) {
        case Expr::Kind::And: return a_.make_and(expr(*e.operands[0]), expr(*e.operands[1]));
        case Expr::Kind::Or: return a_.make_or(expr(*e.operands[0]), expr(*e.operands[1]));
        case Expr::Kind::Not: return a_.make_not(expr(*e.operands[0]));
        case Expr::Kind::Path: return steps(e.path.steps, 0, a_.make_true(), false);
        case Expr::Kind::Compare: return steps(e.path.steps, 0, value(e), false);
        }
        return a_.make_false();
    }

    // True when some text below (or at) the node satisfies the comparison.
    FormulaId value(Expr const& e) {
        TextPredicate kind = TextPredicate::Equals;
        if (e.comparison == Comparison::Contains) kind = TextPredicate::Contains;
        if (e.comparison == Comparison::StartsWith) kind = TextPredicate::StartsWith;
        PredId const p = a_.intern_predicate({kind, e.literal});
        FormulaId const atom = a_.make({Op::TextPred, p});
        auto [it, fresh] = value_states_.try_emplace(p, 0);
        if (fresh) {
            StateId const q = state(StateKind::Value, false);
            a_.add_transition(q, text_, atom);
            a_.add_transition(q, not_attr_text_, a_.make({Op::Down1, q}));
            a_.add_transition(q, all_, a_.make({Op::Down2, q}));
            it->second = q;
        }
        return a_.make_or(a_.make_and(a_.make({Op::LabelIn, text_}), atom), a_.make({Op::Down1, it->second}));
    }

    Automaton& a_;
    TagDictionary const& tags_;
    std::vector<TagId> attribute_names_;
    std::vector<StateKind> kinds_;
    std::map<PredId, StateId> value_states_;
    LabelSetId all_ = 0, not_attr_text_ = 0, text_ = 0;
};

}  // namespace

Automaton compile(LocationPath const& query, TagDictionary const& tags) {
    Automaton a;
    Compiler(a, tags).run(query);
    a.finish(tags.size());
    return a;
}

}  // namespace sxsi
