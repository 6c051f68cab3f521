#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "support/dom.hpp"
#include "support/generators.hpp"
#include "support/xpath_oracle.hpp"
#include "sxsi/engine.hpp"

using namespace sxsi;
using sxsi::testing::Dom;

namespace {

struct Indexed {
    DocumentModel model;
    TreeIndex tree;
    FMIndex fm;

    explicit Indexed(std::string_view xml)
        : model(parse_document(xml)), tree(model), fm(model.texts.empty() ? FMIndex() : FMIndex(model.texts, 8)) {}

    FMIndex const* text() const { return model.texts.empty() ? nullptr : &fm; }
};

std::vector<std::size_t> ids(MarkTree const& m) { return m.enumerate(); }

std::vector<std::size_t> run_with(Indexed const& d, std::string const& q, Strategy s) {
    return ids(evaluate(q, d.tree, d.text(), s).marks);
}

// Transition written with states renamed through `names`.
using Edge = std::tuple<std::string, std::string, std::string>;

std::set<Edge> edges(Automaton const& a, TagDictionary const& tags, std::vector<std::string> const& names) {
    std::set<Edge> out;
    for (StateId q = 0; q < a.states.size(); ++q) {
        for (auto const& tr : a.states[q].transitions) {
            auto const& f = a.formula(tr.formula);
            std::string rhs;
            if (f.op == Op::Down1) rhs = "down1 " + names[f.a];
            else if (f.op == Op::Down2) rhs = "down2 " + names[f.a];
            else rhs = a.describe_formula(tr.formula, tags);
            out.emplace(names[q], a.describe_labels(tr.labels, tags), rhs);
        }
    }
    return out;
}

}  // namespace

TEST_CASE("parser: accepted shapes") {
    auto p = parse_xpath("/descendant::listitem/descendant::keyword");
    CHECK(p.absolute);
    REQUIRE(p.steps.size() == 2);
    CHECK(p.steps[0].axis == Axis::Descendant);
    CHECK(p.steps[0].test.name == "listitem");
    CHECK(p.steps[1].axis == Axis::Descendant);
    CHECK(p.steps[1].test.name == "keyword");

    p = parse_xpath("//a[b and not(c)]");
    REQUIRE(p.steps.size() == 1);
    CHECK(p.steps[0].axis == Axis::Descendant);
    REQUIRE(p.steps[0].predicates.size() == 1);
    auto const& pred = *p.steps[0].predicates[0];
    REQUIRE(pred.kind == Expr::Kind::And);
    CHECK(pred.operands[0]->kind == Expr::Kind::Path);
    CHECK(pred.operands[1]->kind == Expr::Kind::Not);
    CHECK(to_string(p) == "/descendant::a[(child::b and not(child::c))]");

    p = parse_xpath("//keyword[contains(.,\"Unique\")]");
    auto const& c = *p.steps[0].predicates[0];
    REQUIRE(c.kind == Expr::Kind::Compare);
    CHECK(c.comparison == Comparison::Contains);
    CHECK(c.literal == "Unique");
    REQUIRE(c.path.steps.size() == 1);
    CHECK(c.path.steps[0].axis == Axis::Self);
    CHECK(c.path.steps[0].test.kind == NodeTest::Kind::Node);

    CHECK(to_string(parse_xpath("//a//b/text()")) == "/descendant::a/descendant::b/child::text()");
    CHECK(to_string(parse_xpath("a//self::b")) == "child::a/descendant-or-self::node()/self::b");
    CHECK(to_string(parse_xpath("//*[starts-with(b, 'x') or . = \"y\"]")) ==
          "/descendant::*[(starts-with(child::b, \"x\") or self::node() = \"y\")]");
    CHECK(to_string(parse_xpath("/a/following-sibling::node()")) == "/child::a/following-sibling::node()");
    CHECK(parse_xpath("/").steps.empty());
}

TEST_CASE("parser: rejections") {
    for (char const* q : {"//a/..", "//a/@id", "//a/parent::b", "//a/ancestor::b", "//a/preceding-sibling::b",
                          "//a[1]", "//a[count(b)]", "//a[b != \"x\"]", "//a[/b]", "//a[b < \"x\"]",
                          "//a/following::b", "//a[ends-with(., \"x\")]", "//a[starts-with(\"x\", .)]"}) {
        CAPTURE(q);
        CHECK_THROWS_AS(parse_xpath(q), UnsupportedError);
    }
    for (char const* q : {"", "//", "/a[", "/a[b", "//a[\"x\"]", "/a/", "a b", "//a['x]", "/bogus::a"}) {
        CAPTURE(q);
        CHECK_THROWS_AS(parse_xpath(q), ParseError);
    }
    try {
        parse_xpath("/a/b[c");
        FAIL("expected a parse error");
    } catch (ParseError const& e) {
        CHECK(e.offset() == 6);
    }
}

TEST_CASE("compile: descendant pair is the six-transition automaton") {
    auto const model = parse_document("<listitem><keyword/></listitem>");
    auto const a = compile(parse_xpath("/descendant::listitem/descendant::keyword"), model.tags);
    REQUIRE(a.states.size() == 2);
    std::size_t transitions = 0;
    for (auto const& s : a.states) transitions += s.transitions.size();
    CHECK(transitions == 6);

    std::set<Edge> const expected{
        {"q0", "{listitem}", "down1 q1"}, {"q0", "L-{#,@}", "down1 q0"}, {"q0", "L", "down2 q0"},
        {"q1", "{keyword}", "mark"},      {"q1", "L-{#,@}", "down1 q1"}, {"q1", "L", "down2 q1"},
    };
    bool matched = false;
    for (auto names : {std::vector<std::string>{"q0", "q1"}, std::vector<std::string>{"q1", "q0"}}) {
        if (edges(a, model.tags, names) != expected) continue;
        StateId const q0 = names[0] == "q0" ? 0 : 1;
        StateSet init;
        init.insert(q0);
        CHECK(a.initial == init);
        matched = true;
    }
    CHECK(matched);

    auto const& q0 = a.states[a.initial.contains(0) ? 0 : 1];
    CHECK(q0.jumpable);
    CHECK(q0.jump_tags == std::vector<TagId>{*model.tags.find("listitem")});
}

TEST_CASE("compile: self::node() marks the context") {
    auto const model = parse_document("<a/>");
    auto const a = compile(parse_xpath("self::node()"), model.tags);
    REQUIRE(a.states.size() == 1);
    REQUIRE(a.states[0].transitions.size() == 1);
    CHECK(a.describe_labels(a.states[0].transitions[0].labels, model.tags) == "L");
    CHECK(a.formula(a.states[0].transitions[0].formula).op == Op::Mark);

    Indexed d("<a/>");
    CHECK(run_with(d, "self::node()", Strategy::TopDown) == std::vector<std::size_t>{1});
    CHECK(run_with(d, "/", Strategy::TopDown) == std::vector<std::size_t>{1});
}

TEST_CASE("formula evaluation truth tables") {
    Indexed d("<r><a/><b/></r>");
    Automaton a;
    StateId const q = a.add_state(true);
    LabelSetId const all = a.intern_labels({true, {}});
    a.add_transition(q, all, a.make({Op::Down2, q}));
    FormulaId const t = a.make_true(), f = a.make_false();
    FormulaId const or_ = a.make({Op::Or, t, f}), and_ = a.make({Op::And, t, f});
    FormulaId const not_t = a.make_not(t), not_f = a.make_not(f);
    FormulaId const d1 = a.make({Op::Down1, q}), d2 = a.make({Op::Down2, q}), mark = a.make({Op::Mark});
    FormulaId const d1_and_mark = a.make_and(d1, mark);
    FormulaId const d1_or_d2 = a.make_or(d1, d2), d1_and_d2 = a.make_and(d1, d2);
    FormulaId const not_mark = a.make_not(a.make_or(mark, d1));
    a.finish(d.tree.tag_count());
    Engine e(a, d.tree);

    Node const v = 2, w = 3, x = 1;
    Mapping with_v, with_w, empty;
    with_v.dom.insert(q);
    with_v.seqs.emplace_back(q, e.leaf(v));
    with_w.dom.insert(q);
    with_w.seqs.emplace_back(q, e.leaf(w));

    auto check = [&](FormulaId phi, Mapping const& r1, Mapping const& r2, bool b, std::vector<Node> nodes) {
        auto [ok, seq] = e.eval_formula(phi, r1, r2, x);
        CHECK(ok == b);
        CHECK(e.nodes(seq) == nodes);
    };
    check(t, empty, empty, true, {});
    check(f, empty, empty, false, {});
    check(not_t, empty, empty, false, {});
    check(not_f, empty, empty, true, {});
    check(or_, empty, empty, true, {});
    check(and_, empty, empty, false, {});
    check(mark, empty, empty, true, {x});
    check(d1_and_mark, with_v, empty, true, {x, v});
    check(d1_and_mark, empty, empty, false, {});
    check(not_mark, with_v, empty, false, {});
    // All four boolean pairs with disjoint sequences on each side.
    for (int b1 = 0; b1 < 2; ++b1) {
        for (int b2 = 0; b2 < 2; ++b2) {
            Mapping const& r1 = b1 ? with_v : empty;
            Mapping const& r2 = b2 ? with_w : empty;
            std::vector<Node> both;
            if (b1) both.push_back(v);
            if (b2) both.push_back(w);
            check(d1_or_d2, r1, r2, b1 || b2, both);
            check(d1_and_d2, r1, r2, b1 && b2, b1 && b2 ? both : std::vector<Node>{});
        }
    }
}

TEST_CASE("runs on small documents") {
    Indexed one("<a/>");
    CHECK(run_with(one, "//a", Strategy::TopDown) == std::vector<std::size_t>{2});

    Indexed li("<listitem><keyword/></listitem>");
    auto const a = compile(parse_xpath("/descendant::listitem/descendant::keyword"), li.tree.tags());
    Engine e(a, li.tree);
    CHECK(e.top_down_run(kNoNode, a.initial).dom.empty());
    auto const root = e.top_down_run(li.tree.root(), a.initial);
    StateId const q0 = a.initial.contains(0) ? 0 : 1;
    REQUIRE(root.dom.contains(q0));
    CHECK(e.nodes(root.seq(q0)) == std::vector<Node>{2});
    CHECK(e.bottom_up_run({}).dom.empty());

    Indexed kw("<keyword/>");
    auto const b = compile(parse_xpath("/descendant::listitem/descendant::keyword"), kw.tree.tags());
    Engine f(b, kw.tree);
    auto const r = f.top_down_run(kw.tree.root(), b.initial);
    CHECK((r.dom & b.initial).empty());
    CHECK(f.answer(r).size() == 0);

    Indexed u("<r><listitem><p><keyword>Unique x</keyword></p><keyword>no</keyword></listitem>"
              "<keyword>Unique</keyword><listitem><keyword>a Unique b</keyword></listitem></r>");
    std::string const q = "//listitem//keyword[contains(.,\"Unique\")]";
    auto const td = run_with(u, q, Strategy::TopDown);
    CHECK(td.size() == 2);
    CHECK(run_with(u, q, Strategy::BottomUp) == td);
    CHECK(evaluate(q, u.tree, u.text(), Strategy::BottomUp).strategy == Strategy::BottomUp);
}

TEST_CASE("differential against the pointer-tree evaluator") {
    std::mt19937_64 rng(2024);
    testing::XmlShape shape;
    shape.tags = {"a", "b", "c", "d", "e", "f"};
    shape.words = {"x", "y", "xy", "yes", "no", "a&b", "ye"};
    std::vector<std::string> const query_tags{"a", "b", "c", "d", "e", "f", "zz"};
    std::vector<std::string> const literals{"x", "y", "xy", "yes", "no", "ye", "a&b", "s x", "q"};

    std::size_t pairs = 0, seeded = 0, nonempty = 0;
    for (int doc = 0; doc < 60; ++doc) {
        shape.max_nodes = doc % 10 == 9 ? 2000 : 20 + rng() % 300;
        shape.max_depth = 3 + rng() % 10;
        testing::XmlGenerator gen(rng, shape);
        Indexed d(gen.document());
        Dom dom(d.model);
        testing::XPathOracle oracle(dom);
        testing::QueryGenerator queries(rng, query_tags, literals);
        for (int k = 0; k < 20; ++k) {
            std::string const q = queries.query();
            CAPTURE(q);
            auto const ast = parse_xpath(q);
            auto const expected = oracle.select(ast);
            auto const a = compile(ast, d.tree.tags());

            auto const planned = plan_and_execute(a, d.tree, d.text());
            CHECK(ids(planned.marks) == expected);

            Engine e(a, d.tree, d.text());
            auto const td = e.top_down_run(d.tree.root(), a.initial);
            CHECK(ids(e.answer(td)) == expected);
            CHECK(e.stats().visited <= d.tree.node_count());

            Engine m(a, d.tree, d.text());
            auto const memo = m.memoized_run(d.tree.root(), a.initial);
            CHECK(memo.dom == td.dom);
            CHECK(ids(m.answer(memo)) == expected);

            Engine j(a, d.tree, d.text());
            auto const jump = j.jumping_run(d.tree.root(), a.initial);
            CHECK((jump.dom & a.initial) == (td.dom & a.initial));
            CHECK(ids(j.answer(jump)) == expected);

            Engine c(a, d.tree, d.text());
            auto const cleared = c.run(d.tree.root(), a.initial, {.memoize = true, .jump = true, .clear_caches_every = 7});
            CHECK(ids(c.answer(cleared)) == expected);

            if (auto p = e.seed_predicate(); p && d.text()) {
                Engine b(a, d.tree, d.text());
                auto const up = b.bottom_up_run(b.seed_nodes(*p));
                CHECK(ids(b.answer(up)) == expected);
                ++seeded;
            }
            if (!expected.empty()) ++nonempty;
            ++pairs;
        }
    }
    CHECK(pairs >= 1000);
    CHECK(seeded >= 50);
    CHECK(nonempty >= 150);
    MESSAGE("pairs=" << pairs << " seeded=" << seeded << " nonempty=" << nonempty);
}

TEST_CASE("transition cache misses bounded by distinct keys") {
    std::string xml = "<r>";
    for (int i = 0; i < 5000; ++i) xml += i % 3 ? "<a/>" : "<b><a/></b>";
    xml += "</r>";
    Indexed d(xml);
    auto const a = compile(parse_xpath("//b/a"), d.tree.tags());
    Engine e(a, d.tree);
    auto const root = e.memoized_run(d.tree.root(), a.initial);
    CHECK(e.answer(root).size() == 1667);
    CHECK(e.stats().trans_misses <= 16);
    CHECK(e.stats().trans_hits + e.stats().trans_misses == e.stats().visited);
}

TEST_CASE("jumping touches few nodes for rare tags") {
    std::string xml = "<r>";
    for (int i = 0; i < 3000; ++i) {
        xml += "<x><y>t</y>";
        if (i == 100 || i == 1500 || i == 2999) xml += "<a/>";
        xml += "</x>";
    }
    xml += "</r>";
    Indexed d(xml);
    auto const a = compile(parse_xpath("//a"), d.tree.tags());
    Engine plain(a, d.tree);
    Engine jump(a, d.tree);
    auto const r1 = plain.top_down_run(d.tree.root(), a.initial);
    auto const r2 = jump.jumping_run(d.tree.root(), a.initial);
    CHECK(ids(plain.answer(r1)) == ids(jump.answer(r2)));
    CHECK(plain.answer(r1).size() == 3);
    CHECK(plain.stats().visited >= d.tree.node_count() / 2);
    CHECK(jump.stats().visited <= 6);
}

TEST_CASE("bottom-up climbs shared segments once") {
    Indexed d("<r><s><t><k>hit</k><k>miss</k><k>hit</k></t></s><u><k>hit</k></u><k>hit</k></r>");
    auto const a = compile(parse_xpath("//k[. = \"hit\"]"), d.tree.tags());
    Engine e(a, d.tree, d.text());
    auto const p = e.seed_predicate();
    REQUIRE(p);
    auto const seeds = e.seed_nodes(*p);
    CHECK(seeds.size() == 4);
    auto const root = e.bottom_up_run(seeds);
    CHECK(e.answer(root).size() == 4);

    Dom dom(d.model);
    std::set<std::size_t> path;
    for (Node s : seeds)
        for (auto const* n = dom.at(s); n; n = n->parent) path.insert(n->open);
    CHECK(e.stats().parent_calls <= path.size());

    std::vector<Node> unsorted(seeds.rbegin(), seeds.rend());
    CHECK_THROWS_AS(e.bottom_up_run(unsorted), std::invalid_argument);
}

TEST_CASE("planner picks bottom-up for rare text matches") {
    std::string xml = "<r>";
    for (int i = 0; i < 2500; ++i) xml += "<item><name>n" + std::to_string(i) + "</name><v>" +
                                          (i == 7 || i == 2000 ? "needle" : "hay") + "</v></item>";
    xml += "</r>";
    Indexed d(xml);
    for (std::string const q : {"//item[v = \"needle\"]", "//item/v[. = \"needle\"]"}) {
        CAPTURE(q);
        auto const auto_run = evaluate(q, d.tree, d.text());
        CHECK(auto_run.strategy == Strategy::BottomUp);
        CHECK(auto_run.count() == 2);
        auto const forced = evaluate(q, d.tree, d.text(), Strategy::Jumping);
        CHECK(ids(forced.marks) == ids(auto_run.marks));
    }

    // The trailing step needs nodes that carry no match, so the run stays top-down.
    auto const trailing = evaluate("//item[v = \"needle\"]/name", d.tree, d.text());
    CHECK(trailing.strategy == Strategy::Jumping);
    CHECK(trailing.count() == 2);

    auto const tree_only = evaluate("//item/name", d.tree, d.text());
    CHECK(tree_only.strategy == Strategy::Jumping);
    CHECK(tree_only.count() == 2500);

    // Equal counts go to top-down.
    auto const tie = evaluate("//item[starts-with(name, \"n\")]", d.tree, d.text());
    CHECK(tie.strategy == Strategy::Jumping);
    CHECK(tie.count() == 2500);

    auto const common = evaluate("//item[v = \"hay\"]", d.tree, d.text());
    CHECK(common.count() == 2498);
    CHECK(ids(common.marks) == run_with(d, "//item[v = \"hay\"]", Strategy::TopDown));
}

TEST_CASE("deep and wide documents do not exhaust the stack") {
    std::string deep;
    for (int i = 0; i < 100000; ++i) deep += "<a>";
    deep += "z";
    for (int i = 0; i < 100000; ++i) deep += "</a>";
    Indexed d(deep);
    CHECK(run_with(d, "//a[not(a)]", Strategy::TopDown).size() == 1);
    CHECK(run_with(d, "//a", Strategy::Jumping).size() == 100000);
    CHECK(run_with(d, "//a[. = \"z\"]", Strategy::BottomUp).size() == 100000);

    std::string wide = "<r>";
    for (int i = 0; i < 100000; ++i) wide += "<b/>";
    wide += "</r>";
    Indexed w(wide);
    CHECK(run_with(w, "/r/b", Strategy::TopDown).size() == 100000);
    CHECK(run_with(w, "/r/b/following-sibling::b", Strategy::Memoized).size() == 99999);
}
