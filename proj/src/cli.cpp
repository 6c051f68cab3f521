#include "sxsi/cli.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace sxsi {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string read_file(std::string const& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

bool needs_texts(Automaton const& a) { return a.predicate_count() > 0; }

// Discards everything written to it.
class NullBuffer : public std::streambuf {
protected:
    int overflow(int c) override { return c; }
    std::streamsize xsputn(char const*, std::streamsize n) override { return n; }
};

}  // namespace

std::size_t peak_rss_kib() {
    std::ifstream status("/proc/self/status");
    std::string line;
    while (std::getline(status, line))
        if (line.rfind("VmHWM:", 0) == 0) return std::stoul(line.substr(6));
    return 0;
}

void serialize_results(QueryResult const& result, TreeIndex const& tree, TextSource const& texts, std::ostream& out) {
    for (Node x : result.nodes(tree)) out << tree.get_subtree(texts, x);
}

int cmd_build(std::string const& xml_path, std::string const& index_path, BuildOptions const& options,
              std::ostream& out, std::ostream& err) {
    try {
        auto const start = Clock::now();
        std::string const xml = read_file(xml_path);
        auto const image = build_index(xml, options);
        std::ofstream file(index_path, std::ios::binary | std::ios::trunc);
        if (!file.write(reinterpret_cast<char const*>(image.data()), static_cast<std::streamsize>(image.size())))
            throw std::runtime_error("cannot write " + index_path);
        file.close();
        double const elapsed = ms_since(start);

        auto index = IndexFile::open(index_path);
        auto const& h = index.header();
        out << "n\t" << h.nodes << "\nd\t" << h.texts << "\nt\t" << h.tags << "\nu\t" << h.text_length << "\nl\t"
            << h.sample_rate << "\n";
        for (std::size_t s = 0; s < kSectionCount; ++s)
            out << "bytes." << section_name(static_cast<Section>(s)) << "\t" << index.entry(static_cast<Section>(s)).length
                << "\n";
        out << "input_bytes\t" << xml.size() << "\nindex_bytes\t" << image.size() << "\nbuild_ms\t" << std::fixed
            << std::setprecision(1) << elapsed << "\npeak_rss_kib\t" << peak_rss_kib() << "\n";
        return kExitOk;
    } catch (std::exception const& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }
}

int cmd_query(QueryRequest const& request, std::ostream& out, std::ostream& err) {
    try {
        auto index = IndexFile::open(request.index_path);
        TreeIndex const& tree = index.tree();
        Automaton const automaton = compile(parse_xpath(request.query), tree.tags());
        // Only touch the text sections when the query or the output needs them.
        FMIndex const* fm = needs_texts(automaton) ? index.fm() : nullptr;

        auto const start = Clock::now();
        QueryResult const result = plan_and_execute(automaton, tree, fm, request.strategy);
        switch (request.mode) {
        case QueryMode::Count: out << result.count() << "\n"; break;
        case QueryMode::Materialize: (void)result.nodes(tree); break;
        case QueryMode::Serialize: {
            TextSource const texts = index.header().texts ? index.texts() : TextSource();
            if (request.output_path.empty()) {
                serialize_results(result, tree, texts, out);
            } else {
                std::ofstream file(request.output_path, std::ios::binary | std::ios::trunc);
                if (!file) throw std::runtime_error("cannot write " + request.output_path);
                serialize_results(result, tree, texts, file);
            }
            break;
        }
        }
        err << "time_ms\t" << std::fixed << std::setprecision(3) << ms_since(start) << "\n";
        if (request.load_trace) *request.load_trace = index.load_trace();
        return kExitOk;
    } catch (UnsupportedError const& e) {
        err << "unsupported: " << e.construct() << "\n";
        return kExitUnsupported;
    } catch (ParseError const& e) {
        err << "query error: " << e.what() << "\n";
        return kExitUnsupported;
    } catch (std::exception const& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }
}

int cmd_bench(std::string const& index_path, std::string const& queries_path, std::size_t repeats, std::ostream& out,
              std::ostream& err) {
    try {
        if (repeats == 0) throw std::invalid_argument("repeats must be positive");
        std::vector<std::string> queries;
        {
            std::istringstream in(read_file(queries_path));
            for (std::string line; std::getline(in, line);) {
                auto const first = line.find_first_not_of(" \t\r");
                if (first == std::string::npos || line[first] == '#') continue;
                queries.push_back(line.substr(first, line.find_last_not_of(" \t\r") - first + 1));
            }
        }
        auto index = IndexFile::open(index_path);
        TreeIndex const& tree = index.tree();
        FMIndex const* fm = index.fm();
        TextSource const texts = index.header().texts ? index.texts() : TextSource();

        out << "query\tmode\tbest_ms\truns\tcount\tpeak_rss_kib\n";
        NullBuffer null_buffer;
        std::ostream sink(&null_buffer);
        for (auto const& q : queries) {
            for (QueryMode mode : {QueryMode::Count, QueryMode::Serialize}) {
                double best = 0;
                std::size_t count = 0;
                for (std::size_t i = 0; i < repeats; ++i) {
                    auto const start = Clock::now();
                    QueryResult const r = evaluate(q, tree, fm);
                    if (mode == QueryMode::Serialize) serialize_results(r, tree, texts, sink);
                    double const ms = ms_since(start);
                    if (i == 0 || ms < best) best = ms;
                    if (i > 0 && r.count() != count) throw std::logic_error("result count changed between runs");
                    count = r.count();
                }
                out << q << "\t" << (mode == QueryMode::Count ? "count" : "serialize") << "\t" << std::fixed
                    << std::setprecision(3) << best << "\t" << repeats << "\t" << count << "\t" << peak_rss_kib()
                    << "\n";
            }
        }
        return kExitOk;
    } catch (UnsupportedError const& e) {
        err << "unsupported: " << e.construct() << "\n";
        return kExitUnsupported;
    } catch (ParseError const& e) {
        err << "error: " << e.what() << "\n";
        return kExitUnsupported;
    } catch (std::exception const& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }
}

}  // namespace sxsi
