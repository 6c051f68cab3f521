#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sxsi/document.hpp"
#include "sxsi/text_index.hpp"
#include "sxsi/tree_index.hpp"

namespace sxsi {

enum class Section : std::uint32_t { Tags, Par, Tag, Leaves, Bwt, Doc, Samples, Plain };
inline constexpr std::size_t kSectionCount = 8;
std::string_view section_name(Section s);

inline constexpr std::uint32_t kIndexVersion = 1;

struct BuildOptions {
    std::size_t sample_rate = kDefaultSampleRate;
    bool plain_text = false;
    bool keep_whitespace = false;
};

struct IndexHeader {
    std::uint64_t nodes = 0;        // n
    std::uint64_t texts = 0;        // d
    std::uint64_t tags = 0;         // t
    std::uint64_t text_length = 0;  // u, terminators included
    std::uint64_t sample_rate = 0;  // l
    std::uint64_t flags = 0;

    static constexpr std::uint64_t kPlainText = 1;
    static constexpr std::uint64_t kKeepWhitespace = 2;
};

struct SectionEntry {
    std::uint64_t offset = 0;
    std::uint64_t length = 0;  // 0 when absent
    std::uint64_t checksum = 0;
};

/// Serialized index image for an XML document.
std::vector<std::uint8_t> build_index(std::string_view xml, BuildOptions const& options);

/// Read-only view of an index file. Sections are read and checked on first use.
class IndexFile {
public:
    static IndexFile open(std::string const& path);

    IndexHeader const& header() const { return header_; }
    SectionEntry const& entry(Section s) const { return table_[static_cast<std::size_t>(s)]; }
    bool has(Section s) const { return entry(s).length != 0; }
    std::uint64_t file_size() const { return file_size_; }

    TreeIndex const& tree();
    /// Null for documents without texts.
    FMIndex const* fm();
    PlainTextStore const* plain();
    /// Plain store when present, else the FM-index.
    TextSource texts();

    /// Sections read so far, in order.
    std::vector<Section> const& load_trace() const { return trace_; }

private:
    std::vector<std::uint8_t> read(Section s);

    std::unique_ptr<std::ifstream> in_;
    std::string path_;
    std::uint64_t file_size_ = 0;
    IndexHeader header_;
    std::array<SectionEntry, kSectionCount> table_{};
    std::vector<Section> trace_;
    std::optional<TreeIndex> tree_;
    std::optional<FMIndex> fm_;
    std::optional<PlainTextStore> plain_;
};

}  // namespace sxsi
