#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "sxsi/engine.hpp"
#include "sxsi/index_file.hpp"

namespace sxsi {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitUnsupported = 2, kExitIo = 3 };

enum class QueryMode { Count, Materialize, Serialize };

struct QueryRequest {
    std::string index_path;
    std::string query;
    QueryMode mode = QueryMode::Count;
    Strategy strategy = Strategy::Auto;
    std::string output_path;  // serialize target; empty writes to `out`
    std::vector<Section>* load_trace = nullptr;  // receives the sections read
};

int cmd_build(std::string const& xml_path, std::string const& index_path, BuildOptions const& options,
              std::ostream& out, std::ostream& err);
int cmd_query(QueryRequest const& request, std::ostream& out, std::ostream& err);
int cmd_bench(std::string const& index_path, std::string const& queries_path, std::size_t repeats, std::ostream& out,
              std::ostream& err);

/// Writes every result node (subtree or text) in document order.
void serialize_results(QueryResult const& result, TreeIndex const& tree, TextSource const& texts, std::ostream& out);

/// Peak resident set size in KiB, or 0 when the platform does not report it.
std::size_t peak_rss_kib();

}  // namespace sxsi
