#include "sxsi/engine.hpp"

#include <algorithm>
#include <stdexcept>

namespace sxsi {

namespace {

// Greatest fixpoint of "every accepting run below q needs a node satisfying p".
bool seedable(Automaton const& a, PredId p) {
    std::vector<char> need(a.states.size(), 1);
    auto needs = [&](auto&& self, FormulaId id) -> bool {
        auto const& f = a.formula(id);
        switch (f.op) {
        case Op::TextPred: return f.a == p;
        case Op::Down1:
        case Op::Down2: return need[f.a];
        case Op::And: return self(self, f.a) || self(self, f.b);
        case Op::Or: return self(self, f.a) && self(self, f.b);
        default: return false;
        }
    };
    for (bool changed = true; changed;) {
        changed = false;
        for (StateId q = 0; q < a.states.size(); ++q) {
            if (!need[q]) continue;
            for (auto const& tr : a.states[q].transitions) {
                if (!needs(needs, tr.formula)) {
                    need[q] = 0;
                    changed = true;
                    break;
                }
            }
        }
    }

    StateSet reach = a.initial;
    std::vector<StateId> todo;
    reach.for_each([&](StateId q) { todo.push_back(q); });
    while (!todo.empty()) {
        StateId const q = todo.back();
        todo.pop_back();
        if (!need[q]) return false;
        for (auto const& tr : a.states[q].transitions) {
            auto const& labels = a.label_set(tr.labels);
            auto const& f = a.formula(tr.formula);
            bool const loop = f.op == Op::Down2 && f.a == q && labels.complement && labels.tags.empty();
            if (!a.down2_states(tr.formula).empty() && !loop) return false;
            StateSet next = a.down1_states(tr.formula);
            next |= a.down2_states(tr.formula);
            next.for_each([&](StateId s) {
                if (!reach.contains(s)) {
                    reach.insert(s);
                    todo.push_back(s);
                }
            });
        }
    }
    return true;
}

}  // namespace

Engine::Engine(Automaton const& automaton, TreeIndex const& tree, FMIndex const* fm)
    : a_(automaton), tree_(tree), fm_(fm), seq_(1), materialized_(automaton.predicate_count()) {
    for (PredId p = 0; p < a_.predicate_count(); ++p) {
        if (seedable(a_, p)) {
            seed_ = p;
            break;
        }
    }
}

std::uint32_t Engine::intern(StateSet const& s) {
    auto [it, fresh] = set_ids_.try_emplace(s, static_cast<std::uint32_t>(sets_.size()));
    if (fresh) {
        sets_.push_back(s);
        jump_.emplace_back();
    }
    return it->second;
}

void Engine::clear_caches() {
    trans_map_.clear();
    eval_map_.clear();
}

std::uint32_t Engine::transitions(TagId tag, std::uint32_t r, bool memoize) {
    std::uint64_t const key = (std::uint64_t{tag} << 32) | r;
    if (memoize) {
        if (auto it = trans_map_.find(key); it != trans_map_.end()) {
            ++stats_.trans_hits;
            return it->second;
        }
    }
    ++stats_.trans_misses;
    TransEntry e;
    sets_[r].for_each([&](StateId q) {
        for (auto const& tr : a_.states[q].transitions) {
            if (!a_.label_contains(tr.labels, tag)) continue;
            e.fired.emplace_back(q, tr.formula);
            e.r1 |= a_.down1_states(tr.formula);
            e.r2 |= a_.down2_states(tr.formula);
            e.has_pred = e.has_pred || a_.has_text_predicate(tr.formula);
        }
    });
    trans_.push_back(std::move(e));
    auto const id = static_cast<std::uint32_t>(trans_.size() - 1);
    if (memoize) trans_map_.emplace(key, id);
    return id;
}

Engine::JumpInfo const& Engine::jump_info(std::uint32_t r) {
    JumpInfo& info = jump_[r];
    if (!info.known) {
        info.known = true;
        info.jumpable = !sets_[r].empty();
        sets_[r].for_each([&](StateId q) {
            auto const& s = a_.states[q];
            info.jumpable = info.jumpable && s.jumpable;
            info.tags.insert(info.tags.end(), s.jump_tags.begin(), s.jump_tags.end());
        });
        std::sort(info.tags.begin(), info.tags.end());
        info.tags.erase(std::unique(info.tags.begin(), info.tags.end()), info.tags.end());
    }
    return info;
}

bool Engine::text_holds(PredId p, Node t) {
    TextId const id = tree_.text_id(t);
    if (id == 0) return false;
    auto const& atom = a_.predicate(p);
    auto& bits = materialized_[p];
    if (bits.empty() && atom.kind == TextPredicate::Contains) {
        if (!fm_) throw std::logic_error("query needs the text index");
        bits.assign(fm_->text_count() + 1, 0);
        for (TextId i : fm_->report(atom.kind, atom.literal, {1, static_cast<TextId>(fm_->text_count())})) bits[i] = 1;
    }
    if (!bits.empty()) return bits[id];
    if (!fm_) throw std::logic_error("query needs the text index");
    return fm_->exists(atom.kind, atom.literal, {id, id});
}

std::pair<bool, Engine::Sources> Engine::eval(FormulaId id, StateSet const& d1, StateSet const& d2, Node t) {
    auto const& f = a_.formula(id);
    Sources none;
    switch (f.op) {
    case Op::True: return {true, none};
    case Op::False: return {false, none};
    case Op::Or: {
        auto x = eval(f.a, d1, d2, t);
        auto y = eval(f.b, d1, d2, t);
        if (x.first && y.first) x.second |= y.second;
        return x.first ? x : y;
    }
    case Op::And: {
        auto x = eval(f.a, d1, d2, t);
        if (!x.first) return {false, none};
        auto y = eval(f.b, d1, d2, t);
        if (!y.first) return {false, none};
        x.second |= y.second;
        return x;
    }
    case Op::Not: return {!eval(f.a, d1, d2, t).first, none};
    case Op::Down1:
        if (!d1.contains(f.a)) return {false, none};
        none.set(f.a);
        return {true, none};
    case Op::Down2:
        if (!d2.contains(f.a)) return {false, none};
        none.set(kMaxStates + f.a);
        return {true, none};
    case Op::Mark: none.set(kSelf); return {true, none};
    case Op::LabelIn: return {a_.label_contains(f.a, tree_.tag(t)), none};
    case Op::TextPred: return {tree_.tag(t) == kTextTag && text_holds(f.a, t), none};
    }
    return {false, none};
}

Engine::Program Engine::program(TransEntry const& te, StateSet const& d1, StateSet const& d2, Node t) {
    Program p;
    for (std::size_t i = 0; i < te.fired.size();) {
        StateId const q = te.fired[i].first;
        bool accepted = false;
        Sources src;
        for (; i < te.fired.size() && te.fired[i].first == q; ++i) {
            auto [ok, s] = eval(te.fired[i].second, d1, d2, t);
            if (ok) {
                accepted = true;
                src |= s;
            }
        }
        if (accepted) {
            p.dom.insert(q);
            p.assign.emplace_back(q, src);
        }
    }
    return p;
}

Mapping Engine::apply(Program const& p, Mapping const& r1, Mapping const& r2, Node t) {
    Mapping m;
    m.dom = p.dom;
    SeqId self = 0;
    for (auto const& [q, src] : p.assign) {
        SeqId s = 0;
        for (unsigned w = 0; w < src.bits.size(); ++w) {
            for (std::uint64_t bits = src.bits[w]; bits; bits &= bits - 1) {
                unsigned const i = w * 64 + std::countr_zero(bits);
                if (i == kSelf) {
                    if (!self) self = leaf(t);
                    s = concat(s, self);
                } else if (i < kMaxStates) {
                    s = concat(s, r1.seq(i));
                } else {
                    s = concat(s, r2.seq(i - kMaxStates));
                }
            }
        }
        if (s) m.seqs.emplace_back(q, s);
    }
    return m;
}

Mapping Engine::evaluate(std::uint32_t te, Node t, Mapping const& r1, Mapping const& r2, bool memoize) {
    if (memoize && !trans_[te].has_pred) {
        EvalKey const key{te, intern(r1.dom), intern(r2.dom)};
        if (auto it = eval_map_.find(key); it != eval_map_.end()) {
            ++stats_.eval_hits;
            return apply(programs_[it->second], r1, r2, t);
        }
        ++stats_.eval_misses;
        programs_.push_back(program(trans_[te], r1.dom, r2.dom, t));
        eval_map_.emplace(key, static_cast<std::uint32_t>(programs_.size() - 1));
        return apply(programs_.back(), r1, r2, t);
    }
    return apply(program(trans_[te], r1.dom, r2.dom, t), r1, r2, t);
}

std::pair<bool, SeqId> Engine::eval_formula(FormulaId f, Mapping const& r1, Mapping const& r2, Node t) {
    auto [ok, src] = eval(f, r1.dom, r2.dom, t);
    Program p;
    if (ok) {
        p.dom.insert(0);
        p.assign.emplace_back(0, src);
    }
    Mapping const m = apply(p, r1, r2, t);
    return {ok, m.seq(0)};
}

SeqId Engine::leaf(Node x) {
    seq_.push_back({0, 0, x});
    return static_cast<SeqId>(seq_.size() - 1);
}

SeqId Engine::concat(SeqId a, SeqId b) {
    if (a == 0) return b;
    if (b == 0 || a == b) return a;
    seq_.push_back({a, b, kNoNode});
    return static_cast<SeqId>(seq_.size() - 1);
}

std::vector<Node> Engine::nodes(SeqId s) const {
    std::vector<Node> out;
    std::vector<char> seen(seq_.size(), 0);
    std::vector<SeqId> todo{s};
    while (!todo.empty()) {
        SeqId const id = todo.back();
        todo.pop_back();
        if (id == 0 || seen[id]) continue;
        seen[id] = 1;
        auto const& n = seq_[id];
        if (n.leaf != kNoNode) out.push_back(n.leaf);
        else todo.insert(todo.end(), {n.right, n.left});
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

MarkTree Engine::answer(Mapping const& root) const {
    MarkTree marks(tree_.node_count());
    std::vector<char> seen(seq_.size(), 0);
    std::vector<SeqId> todo;
    (a_.initial & root.dom).for_each([&](StateId q) { todo.push_back(root.seq(q)); });
    while (!todo.empty()) {
        SeqId const id = todo.back();
        todo.pop_back();
        if (id == 0 || seen[id]) continue;
        seen[id] = 1;
        auto const& n = seq_[id];
        if (n.leaf != kNoNode) marks.insert(tree_.preorder(n.leaf));
        else todo.insert(todo.end(), {n.right, n.left});
    }
    return marks;
}

void Engine::after_visit(RunOptions const& options) {
    ++stats_.visited;
    if (options.clear_caches_every && stats_.visited % options.clear_caches_every == 0) clear_caches();
}

Mapping Engine::run(Node t, StateSet r, RunOptions const& o) {
    if (t == kNoNode || r.empty()) return {};
    std::size_t const trans_base = trans_.size();
    std::size_t const limit = t == tree_.root() ? tree_.par().size() : tree_.close(tree_.parent(t));

    // A frame walks one region: either the sibling chain starting at pos, or,
    // in jump mode, the topmost nodes in [pos, limit) carrying a jump tag.
    struct Item {
        Node node;
        std::uint32_t te;
        Mapping r1;
    };
    struct Frame {
        bool jump;
        std::uint32_t r;
        std::size_t pos, limit, base;
    };
    std::vector<Item> items;
    std::vector<Frame> frames;
    auto open_frame = [&](std::uint32_t rid, std::size_t pos, std::size_t end) {
        bool const jump = o.jump && jump_info(rid).jumpable;
        frames.push_back({jump, rid, pos, end, items.size()});
    };
    open_frame(intern(r), t, limit);

    Mapping result;
    while (true) {
        Frame& f = frames.back();
        Node y = kNoNode;
        if (f.jump) {
            for (TagId tag : jump_info(f.r).tags) y = std::min(y, tree_.tagged_in(f.pos, f.limit, tag));
            if (y != kNoNode) ++stats_.jumps;
        } else {
            y = f.pos;
        }

        if (y == kNoNode) {
            // Fold the region right to left; each item sees the rest as its right part.
            Mapping acc;
            for (std::size_t i = items.size(); i-- > f.base;)
                acc = evaluate(items[i].te, items[i].node, items[i].r1, acc, o.memoize);
            items.resize(f.base);
            frames.pop_back();
            if (frames.empty()) {
                result = std::move(acc);
                break;
            }
            items.back().r1 = std::move(acc);
            continue;
        }

        after_visit(o);
        std::uint32_t const te = transitions(tree_.tag(y), f.r, o.memoize);
        std::size_t const c = tree_.close(y);
        StateSet const r1 = trans_[te].r1, r2 = trans_[te].r2;
        items.push_back({y, te, {}});
        if (f.jump) {
            f.pos = c + 1;
        } else if (r2.empty()) {
            f.pos = kNoNode;
        } else {
            f.r = intern(r2);
            if (o.jump && jump_info(f.r).jumpable) {
                f.jump = true;
                f.pos = c + 1;
            } else {
                f.pos = c + 1 < f.limit && tree_.is_open(c + 1) ? c + 1 : kNoNode;
            }
        }
        if (!r1.empty() && tree_.is_open(y + 1)) open_frame(intern(r1), y + 1, c);
    }
    if (!o.memoize) trans_.resize(trans_base);
    return result;
}

Mapping Engine::loop(Mapping const& m) const {
    Mapping out;
    m.dom.for_each([&](StateId q) {
        if (a_.states[q].sibling_loop) out.dom.insert(q);
    });
    for (auto const& [q, s] : m.seqs)
        if (out.dom.contains(q)) out.seqs.emplace_back(q, s);
    return out;
}

std::vector<Node> Engine::seed_nodes(PredId p) const {
    std::vector<Node> out;
    if (!fm_ || fm_->text_count() == 0) return out;
    auto const& atom = a_.predicate(p);
    auto& bits = const_cast<std::vector<char>&>(materialized_[p]);
    bits.assign(fm_->text_count() + 1, 0);
    for (TextId id : fm_->report(atom.kind, atom.literal, {1, static_cast<TextId>(fm_->text_count())})) {
        bits[id] = 1;
        Node const x = tree_.text_node(id);
        if (tree_.tag(x) == kTextTag) out.push_back(x);
    }
    return out;
}

Mapping Engine::bottom_up_run(std::vector<Node> const& seeds) {
    if (seeds.empty()) return {};
    if (!std::is_sorted(seeds.begin(), seeds.end())) throw std::invalid_argument("seeds must be in document order");
    std::uint32_t const all = intern(a_.all_states());

    struct Rec {
        std::vector<Node> kids;
        Mapping b1;  // result for the first child's binary subtree
    };
    std::unordered_map<Node, Rec> recs;
    std::vector<Node> order;

    // Climb from every seed, stopping at the first node already reached.
    for (Node s : seeds) {
        if (recs.contains(s)) continue;
        recs[s];
        order.push_back(s);
        for (Node x = s; x != tree_.root();) {
            Node const p = tree_.parent(x);
            ++stats_.parent_calls;
            bool const fresh = !recs.contains(p);
            recs[p].kids.push_back(x);
            if (!fresh) break;
            order.push_back(p);
            x = p;
        }
    }

    std::sort(order.begin(), order.end(), std::greater<>());
    for (Node v : order) {
        Rec& rv = recs[v];
        auto& kids = rv.kids;
        std::sort(kids.begin(), kids.end());
        Mapping acc;
        for (std::size_t i = kids.size(); i-- > 0;) {
            Node const c = kids[i];
            // Unseeded siblings in between only pass the sibling loops on.
            bool const adjacent = i + 1 < kids.size() && tree_.next_sibling(c) == kids[i + 1];
            Mapping const r2 = adjacent ? std::move(acc) : loop(acc);
            ++stats_.visited;
            std::uint32_t const te = transitions(tree_.tag(c), all, true);
            auto it = recs.find(c);
            acc = evaluate(te, c, it->second.b1, r2, true);
            recs.erase(it);
        }
        rv.b1 = !kids.empty() && kids[0] == v + 1 ? std::move(acc) : loop(acc);
    }

    Rec& top = recs[tree_.root()];
    ++stats_.visited;
    std::uint32_t const te = transitions(tree_.tag(tree_.root()), all, true);
    return evaluate(te, tree_.root(), top.b1, {}, true);
}

std::vector<Node> QueryResult::nodes(TreeIndex const& tree) const {
    std::vector<Node> out;
    for (std::size_t id : marks.enumerate()) out.push_back(tree.node_at_preorder(id));
    return out;
}

QueryResult plan_and_execute(Automaton const& automaton, TreeIndex const& tree, FMIndex const* fm, Strategy strategy) {
    Engine engine(automaton, tree, fm);
    auto const seed = engine.seed_predicate();
    bool const can_seed = seed && fm;
    if (strategy == Strategy::BottomUp && !can_seed) strategy = Strategy::Jumping;
    if (strategy == Strategy::Auto) {
        strategy = Strategy::Jumping;
        if (can_seed) {
            auto const& atom = automaton.predicate(*seed);
            std::size_t const hits =
                fm->text_count() == 0 ? 0
                : atom.kind == TextPredicate::Contains
                    ? fm->count_all_occurrences(atom.literal)
                    : fm->count(atom.kind, atom.literal, {1, static_cast<TextId>(fm->text_count())});
            std::size_t rarest = tree.node_count();
            for (auto const& s : automaton.states)
                for (auto const& tr : s.transitions) {
                    auto const& labels = automaton.label_set(tr.labels);
                    if (labels.complement) continue;
                    for (TagId t : labels.tags)
                        if (t != kTextTag) rarest = std::min(rarest, tree.tag_total(t));
                }
            // Ties go to top-down.
            if (hits < rarest) strategy = Strategy::BottomUp;
        }
    }

    Mapping root;
    switch (strategy) {
    case Strategy::TopDown: root = engine.top_down_run(tree.root(), automaton.initial); break;
    case Strategy::Memoized: root = engine.memoized_run(tree.root(), automaton.initial); break;
    case Strategy::BottomUp: root = engine.bottom_up_run(engine.seed_nodes(*seed)); break;
    default: root = engine.jumping_run(tree.root(), automaton.initial); break;
    }
    return {engine.answer(root), strategy, engine.stats()};
}

QueryResult evaluate(std::string_view xpath, TreeIndex const& tree, FMIndex const* fm, Strategy strategy) {
    Automaton const a = compile(parse_xpath(xpath), tree.tags());
    return plan_and_execute(a, tree, fm, strategy);
}

}  // namespace sxsi
