#include "sxsi/text_index.hpp"

#include <algorithm>
#include <stdexcept>

namespace sxsi {

namespace {

// Cyclic suffix array of T by prefix doubling with counting sorts. The
// terminator of text i gets rank i, bytes come after every terminator.
std::vector<std::uint32_t> suffix_array(std::vector<std::uint32_t> const& symbols, std::size_t alphabet) {
    std::size_t const n = symbols.size();
    std::vector<std::uint32_t> sa(n), tmp(n), rank(symbols), next_rank(n);
    std::vector<std::uint32_t> bucket(std::max(n, alphabet) + 1);

    auto counting_sort = [&](std::vector<std::uint32_t> const& order, std::size_t classes) {
        std::fill(bucket.begin(), bucket.begin() + classes + 1, 0);
        for (std::size_t i = 0; i < n; ++i) ++bucket[rank[i] + 1];
        for (std::size_t c = 1; c <= classes; ++c) bucket[c] += bucket[c - 1];
        for (std::uint32_t p : order) sa[bucket[rank[p]]++] = p;
    };

    auto reclassify = [&](std::size_t k) {
        next_rank[sa[0]] = 0;
        std::uint32_t r = 0;
        for (std::size_t i = 1; i < n; ++i) {
            std::uint32_t const a = sa[i - 1], b = sa[i];
            if (rank[a] != rank[b] || (k > 0 && rank[(a + k) % n] != rank[(b + k) % n])) ++r;
            next_rank[b] = r;
        }
        rank.swap(next_rank);
        return std::size_t{r} + 1;
    };

    for (std::size_t i = 0; i < n; ++i) tmp[i] = static_cast<std::uint32_t>(i);
    counting_sort(tmp, alphabet);
    std::size_t classes = reclassify(0);
    for (std::size_t k = 1; classes < n; k <<= 1) {
        if (k >= n) throw std::logic_error("suffix sorting did not converge");
        // Positions ordered by the rank of their second half, then stably by the first.
        for (std::size_t i = 0; i < n; ++i) tmp[i] = static_cast<std::uint32_t>((sa[i] + n - k % n) % n);
        counting_sort(tmp, classes);
        classes = reclassify(k);
    }
    return sa;
}

}  // namespace

// ---------------------------------------------------------------- FMIndex

FMIndex::FMIndex(std::span<std::string const> texts, std::size_t sample_rate)
    : d_(texts.size()), sample_rate_(sample_rate) {
    if (texts.empty()) throw std::invalid_argument("text collection is empty");
    if (sample_rate_ == 0) throw std::invalid_argument("sample rate must be positive");
    if (texts.size() >= (std::size_t{1} << 31)) throw std::invalid_argument("too many texts");

    std::array<std::uint64_t, 256> freq{};
    for (auto const& text : texts) {
        if (text.empty()) throw std::invalid_argument("texts must be non-empty");
        for (unsigned char c : text) {
            if (c == 0) throw std::invalid_argument("texts must not contain byte 0");
            ++freq[c];
        }
        u_ += text.size() + 1;
    }
    if (u_ >= (std::uint64_t{1} << 32)) throw std::invalid_argument("collection too large");

    code_of_.fill(-1);
    byte_of_.push_back(0);
    code_of_[0] = 0;
    for (unsigned c = 1; c < 256; ++c) {
        if (freq[c] == 0) continue;
        code_of_[c] = static_cast<std::int16_t>(byte_of_.size());
        byte_of_.push_back(static_cast<std::uint8_t>(c));
    }
    less_than_[0] = 0;
    less_than_[1] = d_;
    for (unsigned c = 1; c < 256; ++c) less_than_[c + 1] = less_than_[c] + freq[c];

    // Symbols for sorting: terminator of text i is i, byte c is d + c - 1.
    std::vector<std::uint32_t> symbols;
    std::vector<std::uint32_t> owner;  // text index of each position
    std::vector<std::uint32_t> offset;
    symbols.reserve(u_);
    owner.reserve(u_);
    offset.reserve(u_);
    for (std::size_t i = 0; i < d_; ++i) {
        auto const& text = texts[i];
        for (std::size_t k = 0; k < text.size(); ++k) {
            symbols.push_back(static_cast<std::uint32_t>(d_ + static_cast<unsigned char>(text[k]) - 1));
            owner.push_back(static_cast<std::uint32_t>(i));
            offset.push_back(static_cast<std::uint32_t>(k));
        }
        symbols.push_back(static_cast<std::uint32_t>(i));
        owner.push_back(static_cast<std::uint32_t>(i));
        offset.push_back(static_cast<std::uint32_t>(text.size()));
    }
    auto const sa = suffix_array(symbols, d_ + 255);
    symbols.clear();
    symbols.shrink_to_fit();

    std::vector<std::uint32_t> bwt(u_);
    std::vector<std::uint32_t> doc;
    doc.reserve(d_);
    std::vector<std::uint64_t> sampled;
    std::vector<std::uint32_t> sample_ids;
    for (std::size_t row = 0; row < u_; ++row) {
        std::uint32_t const p = sa[row];
        std::uint32_t const off = offset[p];
        std::size_t const len = texts[owner[p]].size();
        if (off == len) {
            bwt[row] = static_cast<std::uint32_t>(code_of_[static_cast<unsigned char>(texts[owner[p]].back())]);
        } else if (off == 0) {
            bwt[row] = 0;
            doc.push_back(owner[p]);
        } else {
            bwt[row] = static_cast<std::uint32_t>(code_of_[static_cast<unsigned char>(texts[owner[p]][off - 1])]);
        }
        if (off != 0 && off != len && (off % sample_rate_ == 0 || off + 1 == len)) {
            sampled.push_back(row);
            sample_ids.push_back(owner[p]);
        }
    }

    bwt_ = WaveletMatrix(bwt, bits_for(byte_of_.size() - 1));
    doc_ = WaveletMatrix(doc, bits_for(d_ - 1));
    sampled_rows_ = SparseBitSequence(sampled, u_);
    sample_text_ = IntVector(sample_ids.size(), bits_for(d_ - 1));
    for (std::size_t i = 0; i < sample_ids.size(); ++i) sample_text_.set(i, sample_ids[i]);
}

std::uint8_t FMIndex::bwt_at(std::size_t row) const {
    if (row < 1 || row > u_) throw std::out_of_range("row out of range");
    return byte_of_[bwt_.access(row - 1)];
}

std::size_t FMIndex::rank_byte(std::uint8_t c, std::size_t row) const {
    auto const code = code_of_[c];
    return code < 0 ? 0 : bwt_.rank(static_cast<std::uint32_t>(code), row);
}

std::size_t FMIndex::lf(std::size_t row) const {
    std::uint8_t const c = bwt_at(row);
    if (c == 0) {
        // The terminator preceding text k belongs to text k - 1, whose row is k - 1.
        TextId const k = doc(terminators_before(row - 1) + 1);
        return k == 1 ? d_ : k - 1;
    }
    return less_than_[c] + rank_byte(c, row);
}

SearchRange FMIndex::backward_search(std::string_view pattern, SearchRange start) const {
    if (pattern.empty()) return start;
    std::size_t sp = start.sp, ep = start.ep;
    for (std::size_t i = pattern.size(); i-- > 0 && sp <= ep;) {
        auto const c = static_cast<std::uint8_t>(pattern[i]);
        if (c == 0 || code_of_[c] < 0) return {1, 0};
        sp = less_than_[c] + rank_byte(c, sp - 1) + 1;
        ep = less_than_[c] + rank_byte(c, ep);
    }
    if (sp > ep) return {1, 0};
    return {sp, ep};
}

TextId FMIndex::locate(std::size_t row) const {
    if (row < 1 || row > u_) throw std::out_of_range("row out of range");
    for (;;) {
        if (row <= d_) return static_cast<TextId>(row);
        std::size_t const r = row - 1;
        std::uint32_t const code = bwt_.access(r);
        if (code == 0) return doc(terminators_before(r) + 1);
        std::size_t const k = sampled_rows_.rank1(r);
        if (sampled_rows_.rank1(r + 1) > k)
            return static_cast<TextId>(sample_text_[k] + 1);
        std::uint8_t const c = byte_of_[code];
        row = less_than_[c] + bwt_.rank(code, row);
    }
}

std::size_t FMIndex::rows_below(std::string_view pattern) const {
    std::size_t n = 0;
    for (std::size_t i = pattern.size(); i-- > 0;) {
        auto const c = static_cast<std::uint8_t>(pattern[i]);
        n = less_than_[c] + rank_byte(c, n);
    }
    return n;
}

IdRange FMIndex::clip(IdRange range) const {
    range.first = std::max<TextId>(range.first, 1);
    range.last = static_cast<TextId>(std::min<std::size_t>(range.last, d_));
    return range;
}

std::pair<std::size_t, std::size_t> FMIndex::doc_slice(TextPredicate pred, std::string_view pattern,
                                                       IdRange range) const {
    auto terminators_in = [&](SearchRange r) -> std::pair<std::size_t, std::size_t> {
        if (r.empty()) return {0, 0};
        return {terminators_before(r.sp - 1), terminators_before(r.ep)};
    };
    auto below = [&](std::string_view p) { return terminators_before(rows_below(p)); };
    std::string const bumped = std::string(pattern) + '\x01';
    switch (pred) {
    case TextPredicate::StartsWith: return terminators_in(backward_search(pattern));
    case TextPredicate::Equals: return terminators_in(backward_search(pattern, {range.first, range.last}));
    case TextPredicate::Less: return {0, below(pattern)};
    case TextPredicate::LessEqual: return {0, below(bumped)};
    case TextPredicate::Greater: return {below(bumped), d_};
    case TextPredicate::GreaterEqual: return {below(pattern), d_};
    default: throw std::logic_error("predicate has no Doc slice");
    }
}

std::vector<TextId> FMIndex::contains_ids(std::string_view pattern, IdRange range, bool first_only) const {
    std::vector<TextId> ids;
    if (pattern.empty()) {
        for (TextId id = range.first; id <= range.last; ++id) ids.push_back(id);
        return ids;
    }
    auto const r = backward_search(pattern);
    for (std::size_t row = r.sp; row <= r.ep && !r.empty(); ++row) {
        TextId const id = locate(row);
        if (!range.contains(id)) continue;
        ids.push_back(id);
        if (first_only) break;
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

bool FMIndex::exists(TextPredicate pred, std::string_view pattern, IdRange range) const {
    range = clip(range);
    if (range.empty()) return false;
    switch (pred) {
    case TextPredicate::Contains: return !contains_ids(pattern, range, true).empty();
    case TextPredicate::EndsWith: return !backward_search(pattern, {range.first, range.last}).empty();
    default: {
        auto const [b, e] = doc_slice(pred, pattern, range);
        return doc_.range_count(b, e, range.first - 1, range.last - 1) > 0;
    }
    }
}

std::size_t FMIndex::count(TextPredicate pred, std::string_view pattern, IdRange range) const {
    range = clip(range);
    if (range.empty()) return 0;
    switch (pred) {
    case TextPredicate::Contains: return contains_ids(pattern, range, false).size();
    case TextPredicate::EndsWith: return backward_search(pattern, {range.first, range.last}).width();
    default: {
        auto const [b, e] = doc_slice(pred, pattern, range);
        return doc_.range_count(b, e, range.first - 1, range.last - 1);
    }
    }
}

std::vector<TextId> FMIndex::report(TextPredicate pred, std::string_view pattern, IdRange range) const {
    range = clip(range);
    std::vector<TextId> ids;
    if (range.empty()) return ids;
    switch (pred) {
    case TextPredicate::Contains: return contains_ids(pattern, range, false);
    case TextPredicate::EndsWith: {
        auto const r = backward_search(pattern, {range.first, range.last});
        for (std::size_t row = r.sp; row <= r.ep && !r.empty(); ++row) ids.push_back(locate(row));
        std::sort(ids.begin(), ids.end());
        return ids;
    }
    default: {
        auto const [b, e] = doc_slice(pred, pattern, range);
        doc_.range_report(b, e, range.first - 1, range.last - 1, [&](std::uint32_t v) {
            ids.push_back(v + 1);
            return true;
        });
        return ids;
    }
    }
}

std::size_t FMIndex::count_all_occurrences(std::string_view pattern) const {
    return backward_search(pattern).width();
}

std::string FMIndex::extract(TextId id) const {
    if (id < 1 || id > d_) throw std::out_of_range("text id out of range");
    std::string out;
    std::size_t row = id;
    for (;;) {
        std::uint32_t const code = bwt_.access(row - 1);
        if (code == 0) break;
        std::uint8_t const c = byte_of_[code];
        out.push_back(static_cast<char>(c));
        row = less_than_[c] + bwt_.rank(code, row);
    }
    std::reverse(out.begin(), out.end());
    return out;
}

std::size_t FMIndex::size_in_bytes() const {
    return sizeof(less_than_) + sizeof(code_of_) + byte_of_.size() + bwt_.size_in_bytes() + doc_.size_in_bytes() +
           sampled_rows_.size_in_bytes() + sample_text_.size_in_bytes();
}

void FMIndex::save(Writer& bwt, Writer& doc, Writer& samples) const {
    bwt.put<std::uint64_t>(u_);
    bwt.put<std::uint64_t>(d_);
    bwt.put<std::uint64_t>(sample_rate_);
    bwt.put_vector(byte_of_);
    bwt_.save(bwt);
    doc_.save(doc);
    sampled_rows_.save(samples);
    sample_text_.save(samples);
}

FMIndex FMIndex::load(Reader& bwt, Reader& doc, Reader& samples) {
    FMIndex fm;
    fm.u_ = bwt.get<std::uint64_t>();
    fm.d_ = bwt.get<std::uint64_t>();
    fm.sample_rate_ = bwt.get<std::uint64_t>();
    fm.byte_of_ = bwt.get_vector<std::uint8_t>();
    if (fm.byte_of_.empty() || fm.byte_of_[0] != 0 || fm.d_ == 0 || fm.sample_rate_ == 0)
        throw FormatError("text index: bad header");
    fm.code_of_.fill(-1);
    for (std::size_t i = 0; i < fm.byte_of_.size(); ++i) {
        if (i > 0 && fm.byte_of_[i] <= fm.byte_of_[i - 1]) throw FormatError("text index: bad alphabet");
        fm.code_of_[fm.byte_of_[i]] = static_cast<std::int16_t>(i);
    }
    fm.bwt_ = WaveletMatrix::load(bwt);
    fm.doc_ = WaveletMatrix::load(doc);
    fm.sampled_rows_ = SparseBitSequence::load(samples);
    fm.sample_text_ = IntVector::load(samples);
    if (fm.bwt_.size() != fm.u_ || fm.doc_.size() != fm.d_ || fm.sampled_rows_.universe() != fm.u_ ||
        fm.sample_text_.size() != fm.sampled_rows_.count() || fm.bwt_.rank(0, fm.u_) != fm.d_)
        throw FormatError("text index: inconsistent sections");
    // C is recomputed from the symbol counts of the BWT.
    fm.less_than_.fill(0);
    fm.less_than_[1] = fm.d_;
    for (unsigned c = 1; c < 256; ++c) {
        auto const code = fm.code_of_[c];
        std::size_t const freq = code < 0 ? 0 : fm.bwt_.rank(static_cast<std::uint32_t>(code), fm.u_);
        fm.less_than_[c + 1] = fm.less_than_[c] + freq;
    }
    return fm;
}

// ---------------------------------------------------------------- PlainTextStore

PlainTextStore::PlainTextStore(std::span<std::string const> texts) {
    std::vector<std::uint64_t> starts;
    starts.reserve(texts.size());
    for (auto const& text : texts) {
        starts.push_back(blob_.size());
        blob_ += text;
        blob_ += '\0';
    }
    starts_ = SparseBitSequence(starts, blob_.size() + 1);
}

std::string_view PlainTextStore::text(TextId id) const {
    if (id < 1 || id > text_count()) throw std::out_of_range("text id out of range");
    std::size_t const begin = starts_.select1_index(id);
    std::size_t const end = id == text_count() ? blob_.size() : starts_.select1_index(id + 1);
    return std::string_view(blob_).substr(begin, end - begin - 1);
}

void PlainTextStore::save(Writer& out) const {
    out.put_string(blob_);
    starts_.save(out);
}

PlainTextStore PlainTextStore::load(Reader& in) {
    PlainTextStore store;
    store.blob_ = in.get_string();
    store.starts_ = SparseBitSequence::load(in);
    if (store.starts_.universe() != store.blob_.size() + 1) throw FormatError("plain text store: bad positions");
    return store;
}

// ---------------------------------------------------------------- TextSource

std::size_t TextSource::text_count() const {
    if (plain_) return plain_->text_count();
    return fm_ ? fm_->text_count() : 0;
}

std::string TextSource::extract_text(TextId id) const {
    if (plain_) return std::string(plain_->text(id));
    if (fm_) return fm_->extract(id);
    throw std::logic_error("no text store loaded");
}

}  // namespace sxsi
