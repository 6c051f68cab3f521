#include <iostream>

#include "CLI11.hpp"
#include "sxsi/cli.hpp"

int main(int argc, char** argv) {
    using namespace sxsi;
    CLI::App app{"Succinct XML index: build indexes and run XPath queries"};
    app.require_subcommand(1);

    std::string xml, index, out_path, query, queries, strategy = "auto";
    BuildOptions build;
    auto* b = app.add_subcommand("build", "Index an XML document");
    b->add_option("xml", xml, "input XML file")->required();
    b->add_option("index", index, "output index file")->required();
    b->add_option("--sample-rate", build.sample_rate, "suffix array sampling step")->check(CLI::PositiveNumber);
    b->add_flag("--plain-text", build.plain_text, "also store texts verbatim");
    b->add_flag("--keep-ws", build.keep_whitespace, "keep whitespace-only texts");

    bool count = false;
    auto* q = app.add_subcommand("query", "Evaluate an XPath query");
    q->add_option("index", index, "index file")->required();
    q->add_option("xpath", query, "query")->required();
    auto* count_flag = q->add_flag("--count", count, "print the number of results (default)");
    q->add_option("--serialize", out_path, "write results to a file ('-' for stdout)")->excludes(count_flag);
    auto* materialize = q->add_flag("--materialize", "build the result set without output")->excludes(count_flag);
    q->add_option("--strategy", strategy, "evaluation strategy")
        ->check(CLI::IsMember({"auto", "topdown", "bottomup"}));

    std::size_t repeats = 5;
    auto* bench = app.add_subcommand("bench", "Time a list of queries");
    bench->add_option("index", index, "index file")->required();
    bench->add_option("queries", queries, "file with one query per line")->required();
    bench->add_option("--repeats", repeats, "runs per query; the best is reported")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    if (b->parsed()) return cmd_build(xml, index, build, std::cout, std::cerr);
    if (bench->parsed()) return cmd_bench(index, queries, repeats, std::cout, std::cerr);

    QueryRequest r;
    r.index_path = index;
    r.query = query;
    if (!out_path.empty()) {
        r.mode = QueryMode::Serialize;
        if (out_path != "-") r.output_path = out_path;
    } else if (materialize->count() > 0) {
        r.mode = QueryMode::Materialize;
    }
    if (strategy == "topdown") r.strategy = Strategy::Jumping;
    if (strategy == "bottomup") r.strategy = Strategy::BottomUp;
    return cmd_query(r, std::cout, std::cerr);
}
