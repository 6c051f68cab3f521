#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sxsi/automaton.hpp"
#include "sxsi/result_set.hpp"
#include "sxsi/text_index.hpp"
#include "sxsi/tree_index.hpp"

namespace sxsi {

/// Handle into the engine's sequence arena; 0 is the empty sequence.
using SeqId = std::uint32_t;

/// States accepted at a node, with the nodes each one marked.
struct Mapping {
    StateSet dom;
    std::vector<std::pair<StateId, SeqId>> seqs;  // sorted by state, non-empty sequences only

    SeqId seq(StateId q) const {
        for (auto const& [s, id] : seqs)
            if (s == q) return id;
        return 0;
    }
};

struct RunStats {
    std::size_t visited = 0;       // nodes at which transitions were selected
    std::size_t parent_calls = 0;  // Parent navigations during bottom-up runs
    std::size_t trans_hits = 0, trans_misses = 0;
    std::size_t eval_hits = 0, eval_misses = 0;
    std::size_t jumps = 0;  // nodes reached through tag jumps
};

struct RunOptions {
    bool memoize = false;
    bool jump = false;
    std::size_t clear_caches_every = 0;  // drop cache maps every k visits (0 = never)
};

enum class Strategy { Auto, TopDown, Memoized, Jumping, BottomUp };

/// Evaluates one automaton over one indexed document. Not thread-safe; use
/// one engine per concurrent query.
class Engine {
public:
    Engine(Automaton const& automaton, TreeIndex const& tree, FMIndex const* fm = nullptr);

    Mapping top_down_run(Node t, StateSet r) { return run(t, r, {}); }
    Mapping memoized_run(Node t, StateSet r) { return run(t, r, {.memoize = true}); }
    Mapping jumping_run(Node t, StateSet r) { return run(t, r, {.memoize = true, .jump = true}); }
    Mapping run(Node t, StateSet r, RunOptions const& options);

    /// Runs from the given # nodes (ascending positions) up to the root. Only
    /// valid when seed_predicate() accepted the automaton.
    Mapping bottom_up_run(std::vector<Node> const& seeds);

    /// Predicate whose matches every accepting run depends on, if the
    /// automaton has the shape bottom-up runs require.
    std::optional<PredId> seed_predicate() const { return seed_; }
    std::vector<Node> seed_nodes(PredId p) const;

    /// One application of the formula semantics at node t.
    std::pair<bool, SeqId> eval_formula(FormulaId f, Mapping const& r1, Mapping const& r2, Node t);

    SeqId leaf(Node x);
    SeqId concat(SeqId a, SeqId b);
    /// Distinct nodes of a sequence, ascending.
    std::vector<Node> nodes(SeqId s) const;

    /// Marks the nodes accepted by initial states, keyed by preorder number.
    MarkTree answer(Mapping const& root) const;

    RunStats const& stats() const { return stats_; }
    void reset_stats() { stats_ = {}; }
    void clear_caches();

    Automaton const& automaton() const { return a_; }

private:
    struct TransEntry {
        std::vector<std::pair<StateId, FormulaId>> fired;  // grouped by state
        StateSet r1, r2;
        bool has_pred = false;
    };
    struct Sources {
        std::array<std::uint64_t, 5> bits{};  // left states, right states, self
        void set(unsigned i) { bits[i / 64] |= std::uint64_t{1} << (i % 64); }
        Sources& operator|=(Sources const& o) {
            for (int i = 0; i < 5; ++i) bits[i] |= o.bits[i];
            return *this;
        }
    };
    static constexpr unsigned kSelf = 2 * kMaxStates;
    struct Program {
        StateSet dom;
        std::vector<std::pair<StateId, Sources>> assign;
    };
    struct SeqNode {
        SeqId left = 0, right = 0;
        Node leaf = kNoNode;
    };
    struct EvalKey {
        std::uint32_t trans, d1, d2;
        friend bool operator==(EvalKey const&, EvalKey const&) = default;
    };
    struct EvalKeyHash {
        std::size_t operator()(EvalKey const& k) const {
            return (std::size_t{k.trans} * 0x9E3779B97F4A7C15ull) ^ (std::size_t{k.d1} << 21) ^ k.d2;
        }
    };
    struct JumpInfo {
        bool known = false, jumpable = false;
        std::vector<TagId> tags;
    };

    std::uint32_t intern(StateSet const& s);
    std::uint32_t transitions(TagId tag, std::uint32_t r, bool memoize);
    JumpInfo const& jump_info(std::uint32_t r);
    std::pair<bool, Sources> eval(FormulaId f, StateSet const& d1, StateSet const& d2, Node t);
    Program program(TransEntry const& te, StateSet const& d1, StateSet const& d2, Node t);
    Mapping apply(Program const& p, Mapping const& r1, Mapping const& r2, Node t);
    Mapping evaluate(std::uint32_t te, Node t, Mapping const& r1, Mapping const& r2, bool memoize);
    Mapping loop(Mapping const& m) const;
    bool text_holds(PredId p, Node t);
    void after_visit(RunOptions const& options);

    Automaton const& a_;
    TreeIndex const& tree_;
    FMIndex const* fm_;
    std::optional<PredId> seed_;

    std::vector<StateSet> sets_;
    std::unordered_map<StateSet, std::uint32_t, StateSetHash> set_ids_;
    std::vector<TransEntry> trans_;
    std::unordered_map<std::uint64_t, std::uint32_t> trans_map_;
    std::vector<Program> programs_;
    std::unordered_map<EvalKey, std::uint32_t, EvalKeyHash> eval_map_;
    std::vector<JumpInfo> jump_;
    std::vector<SeqNode> seq_;
    std::vector<std::vector<char>> materialized_;  // per predicate, indexed by text id
    RunStats stats_;
};

struct QueryResult {
    MarkTree marks;
    Strategy strategy = Strategy::TopDown;  // strategy actually used
    RunStats stats;

    std::size_t count() const { return marks.size(); }
    /// Result nodes in document order.
    std::vector<Node> nodes(TreeIndex const& tree) const;
};

/// Chooses between bottom-up and jumping top-down using text and tag counts,
/// unless a strategy is forced.
QueryResult plan_and_execute(Automaton const& automaton, TreeIndex const& tree, FMIndex const* fm,
                             Strategy strategy = Strategy::Auto);

QueryResult evaluate(std::string_view xpath, TreeIndex const& tree, FMIndex const* fm,
                     Strategy strategy = Strategy::Auto);

}  // namespace sxsi
