#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sxsi/bit_vector.hpp"
#include "sxsi/wavelet_matrix.hpp"

namespace sxsi {

/// 1-based text identifier.
using TextId = std::uint32_t;

/// Inclusive range of text identifiers; empty when first > last.
struct IdRange {
    TextId first = 1;
    TextId last = 0;

    bool empty() const { return first > last; }
    std::size_t size() const { return empty() ? 0 : last - first + 1; }
    bool contains(TextId id) const { return id >= first && id <= last; }
    friend bool operator==(IdRange const&, IdRange const&) = default;
};

/// Inclusive 1-based row interval of the sorted rotation matrix.
struct SearchRange {
    std::size_t sp = 1;
    std::size_t ep = 0;

    bool empty() const { return sp > ep; }
    std::size_t width() const { return empty() ? 0 : ep - sp + 1; }
    friend bool operator==(SearchRange const&, SearchRange const&) = default;
};

enum class TextPredicate { StartsWith, EndsWith, Equals, Contains, Less, LessEqual, Greater, GreaterEqual };

inline constexpr std::size_t kDefaultSampleRate = 64;

/// FM-index over a collection of $-terminated texts.
///
/// The terminator of text i sorts below every byte and below the terminator
/// of text j > i, so rows 1..d of the matrix are the terminators in text
/// order. Doc maps the j-th terminator of the BWT to the text that starts at
/// that row.
class FMIndex {
public:
    FMIndex() = default;
    FMIndex(std::span<std::string const> texts, std::size_t sample_rate = kDefaultSampleRate);

    std::size_t length() const { return u_; }
    std::size_t text_count() const { return d_; }
    std::size_t sample_rate() const { return sample_rate_; }

    /// Byte of L at 1-based row i (0 is the terminator).
    std::uint8_t bwt_at(std::size_t row) const;
    std::size_t lf(std::size_t row) const;
    /// Number of symbols in the collection smaller than byte c.
    std::size_t count_smaller(std::uint8_t c) const { return less_than_[c]; }

    SearchRange full_range() const { return {1, u_}; }
    SearchRange backward_search(std::string_view pattern, SearchRange start) const;
    SearchRange backward_search(std::string_view pattern) const { return backward_search(pattern, full_range()); }

    /// Text containing the symbol at which the suffix of `row` starts.
    TextId locate(std::size_t row) const;
    /// Text id of the terminator with BWT-rank j (1-based).
    TextId doc(std::size_t j) const { return doc_.access(j - 1) + 1; }

    bool exists(TextPredicate pred, std::string_view pattern, IdRange range) const;
    std::size_t count(TextPredicate pred, std::string_view pattern, IdRange range) const;
    /// Matching ids in increasing order.
    std::vector<TextId> report(TextPredicate pred, std::string_view pattern, IdRange range) const;

    /// Raw number of occurrences of the pattern in the collection.
    std::size_t count_all_occurrences(std::string_view pattern) const;

    std::string extract(TextId id) const;

    std::size_t size_in_bytes() const;

    void save(Writer& out) const { save(out, out, out); }
    static FMIndex load(Reader& in) { return load(in, in, in); }
    /// Split form: L with the alphabet, the Doc array, and the locate samples.
    void save(Writer& bwt, Writer& doc, Writer& samples) const;
    static FMIndex load(Reader& bwt, Reader& doc, Reader& samples);

private:
    std::size_t terminators_before(std::size_t row) const { return bwt_.rank(0, row); }
    std::size_t rank_byte(std::uint8_t c, std::size_t row) const;
    /// Number of suffixes lexicographically smaller than the pattern.
    std::size_t rows_below(std::string_view pattern) const;
    IdRange clip(IdRange range) const;
    /// Terminator ranks [first, last) whose Doc values answer the predicate;
    /// Contains is not expressible this way.
    std::pair<std::size_t, std::size_t> doc_slice(TextPredicate pred, std::string_view pattern, IdRange range) const;
    std::vector<TextId> contains_ids(std::string_view pattern, IdRange range, bool first_only) const;

    std::size_t u_ = 0;
    std::size_t d_ = 0;
    std::size_t sample_rate_ = kDefaultSampleRate;
    std::array<std::int16_t, 256> code_of_{};    // byte -> compact symbol, -1 if absent
    std::vector<std::uint8_t> byte_of_;           // compact symbol -> byte
    std::array<std::uint64_t, 257> less_than_{};  // indexed by byte
    WaveletMatrix bwt_;
    WaveletMatrix doc_;
    SparseBitSequence sampled_rows_;
    IntVector sample_text_;
};

/// Texts stored verbatim with an Elias-Fano start-position sequence.
class PlainTextStore {
public:
    PlainTextStore() = default;
    explicit PlainTextStore(std::span<std::string const> texts);

    std::size_t text_count() const { return starts_.count(); }
    std::string_view text(TextId id) const;

    std::size_t size_in_bytes() const { return blob_.size() + starts_.size_in_bytes(); }

    void save(Writer& out) const;
    static PlainTextStore load(Reader& in);

private:
    std::string blob_;
    SparseBitSequence starts_;
};

/// Text extraction front end: plain store when loaded, else reverse LF walk.
class TextSource {
public:
    TextSource() = default;
    TextSource(FMIndex const* fm, PlainTextStore const* plain) : fm_(fm), plain_(plain) {}

    std::size_t text_count() const;
    std::string extract_text(TextId id) const;
    bool available() const { return fm_ != nullptr || plain_ != nullptr; }

private:
    FMIndex const* fm_ = nullptr;
    PlainTextStore const* plain_ = nullptr;
};

}  // namespace sxsi
