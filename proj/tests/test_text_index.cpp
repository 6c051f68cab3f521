#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "sxsi/text_index.hpp"

using namespace sxsi;

namespace {

// Sort all rotations of T naively; terminator i compares as (0, i), byte c as (1, c).
struct NaiveBwt {
    std::string bwt;              // '\0' for terminators
    std::vector<TextId> doc;      // text starting after each terminator of bwt, in order
    std::vector<std::size_t> sa;  // rotation start per row
};

NaiveBwt naive_bwt(std::vector<std::string> const& texts) {
    std::vector<std::pair<int, unsigned>> t;
    std::vector<TextId> owner;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        for (unsigned char c : texts[i]) {
            t.emplace_back(1, c);
            owner.push_back(static_cast<TextId>(i + 1));
        }
        t.emplace_back(0, static_cast<unsigned>(i));
        owner.push_back(static_cast<TextId>(i + 1));
    }
    std::size_t const n = t.size();
    std::vector<std::size_t> rows(n);
    for (std::size_t i = 0; i < n; ++i) rows[i] = i;
    std::sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
        for (std::size_t k = 0; k < n; ++k) {
            auto const& x = t[(a + k) % n];
            auto const& y = t[(b + k) % n];
            if (x != y) return x < y;
        }
        return false;
    });
    NaiveBwt out;
    out.sa = rows;
    for (std::size_t r : rows) {
        auto const& prev = t[(r + n - 1) % n];
        out.bwt += prev.first == 0 ? '\0' : static_cast<char>(prev.second);
        if (prev.first == 0) out.doc.push_back(owner[r]);
    }
    return out;
}

std::size_t naive_occurrences(std::vector<std::string> const& texts, std::string const& p) {
    std::size_t count = 0;
    for (auto const& text : texts)
        for (std::size_t i = 0; i + p.size() <= text.size(); ++i)
            if (text.compare(i, p.size(), p) == 0) ++count;
    return count;
}

bool naive_holds(TextPredicate pred, std::string const& text, std::string const& p) {
    switch (pred) {
    case TextPredicate::StartsWith: return text.starts_with(p);
    case TextPredicate::EndsWith: return text.ends_with(p);
    case TextPredicate::Equals: return text == p;
    case TextPredicate::Contains: return text.find(p) != std::string::npos;
    case TextPredicate::Less: return text < p;
    case TextPredicate::LessEqual: return text <= p;
    case TextPredicate::Greater: return text > p;
    case TextPredicate::GreaterEqual: return text >= p;
    }
    return false;
}

std::vector<TextId> naive_report(std::vector<std::string> const& texts, TextPredicate pred, std::string const& p,
                                 IdRange range) {
    std::vector<TextId> ids;
    for (TextId id = range.first; id <= range.last; ++id)
        if (naive_holds(pred, texts[id - 1], p)) ids.push_back(id);
    return ids;
}

constexpr TextPredicate kAllPredicates[] = {
    TextPredicate::StartsWith, TextPredicate::EndsWith, TextPredicate::Equals,    TextPredicate::Contains,
    TextPredicate::Less,       TextPredicate::LessEqual, TextPredicate::Greater, TextPredicate::GreaterEqual};

std::vector<std::string> random_texts(std::mt19937_64& rng, std::size_t count, std::size_t max_len,
                                      std::string const& alphabet) {
    std::vector<std::string> texts;
    std::uniform_int_distribution<std::size_t> len(1, max_len), pick(0, alphabet.size() - 1);
    for (std::size_t i = 0; i < count; ++i) {
        std::string s;
        for (std::size_t k = len(rng); k > 0; --k) s += alphabet[pick(rng)];
        texts.push_back(s);
    }
    return texts;
}

void check_against_oracle(std::vector<std::string> const& texts, FMIndex const& fm) {
    auto const oracle = naive_bwt(texts);
    REQUIRE(fm.length() == oracle.bwt.size());
    for (std::size_t row = 1; row <= fm.length(); ++row) CHECK(fm.bwt_at(row) == static_cast<std::uint8_t>(oracle.bwt[row - 1]));
    for (std::size_t j = 1; j <= fm.text_count(); ++j) CHECK(fm.doc(j) == oracle.doc[j - 1]);
    std::vector<std::size_t> image;
    for (std::size_t row = 1; row <= fm.length(); ++row) image.push_back(fm.lf(row));
    std::sort(image.begin(), image.end());
    for (std::size_t row = 1; row <= fm.length(); ++row) CHECK(image[row - 1] == row);
}

}  // namespace

TEST_CASE("wavelet matrix matches a scan") {
    std::mt19937_64 rng(7);
    for (unsigned levels : {1u, 3u, 8u}) {
        std::uniform_int_distribution<std::uint32_t> value(0, (1u << levels) - 1);
        std::vector<std::uint32_t> v(700);
        for (auto& x : v) x = value(rng);
        WaveletMatrix wm(v, levels);
        std::uniform_int_distribution<std::size_t> pos(0, v.size());
        for (int trial = 0; trial < 300; ++trial) {
            std::size_t b = pos(rng), e = pos(rng);
            if (b > e) std::swap(b, e);
            std::uint32_t lo = value(rng), hi = value(rng);
            if (lo > hi) std::swap(lo, hi);
            std::size_t in_range = 0;
            std::vector<std::uint32_t> expected;
            for (std::size_t i = b; i < e; ++i)
                if (v[i] >= lo && v[i] <= hi) {
                    ++in_range;
                    expected.push_back(v[i]);
                }
            std::sort(expected.begin(), expected.end());
            CHECK(wm.range_count(b, e, lo, hi) == in_range);
            std::vector<std::uint32_t> got;
            wm.range_report(b, e, lo, hi, [&](std::uint32_t x) {
                got.push_back(x);
                return true;
            });
            CHECK(got == expected);
            std::uint32_t const c = value(rng);
            CHECK(wm.rank(c, e) == static_cast<std::size_t>(std::count(v.begin(), v.begin() + e, c)));
        }
        for (std::size_t i = 0; i < v.size(); ++i) CHECK(wm.access(i) == v[i]);
    }
}

TEST_CASE("construction on small collections") {
    std::vector<std::string> const two{"aba", "ab"};
    FMIndex fm(two, 1);
    check_against_oracle(two, fm);
    CHECK(fm.text_count() == 2);
    CHECK(fm.length() == 7);
    // Row i starts with the terminator of text i.
    auto const oracle = naive_bwt(two);
    CHECK(oracle.sa[0] == 3);
    CHECK(oracle.sa[1] == 6);

    std::vector<std::string> const one{"a"};
    FMIndex single(one);
    CHECK(single.bwt_at(1) == 'a');
    CHECK(single.bwt_at(2) == 0);
    CHECK(single.lf(1) == 2);
    CHECK(single.extract(1) == "a");

    std::vector<std::string> const x{"x"};
    FMIndex fx(x);
    CHECK(fx.count_all_occurrences("x") == 1);
    CHECK(fx.count_all_occurrences("y") == 0);
}

TEST_CASE("backward search and LF walk") {
    std::vector<std::string> const texts{"aba", "ab"};
    FMIndex fm(texts, 1);
    CHECK(fm.backward_search("") == fm.full_range());
    CHECK(fm.backward_search("ab").width() == 2);
    CHECK(fm.backward_search("zz").empty());
    std::string walked;
    for (std::size_t row = 1; fm.bwt_at(row) != 0; row = fm.lf(row)) walked += static_cast<char>(fm.bwt_at(row));
    CHECK(walked == "aba");
    CHECK(fm.extract(1) == "aba");
    CHECK(fm.extract(2) == "ab");
    CHECK_THROWS_AS(fm.extract(3), std::out_of_range);
}

TEST_CASE("predicates on a two-text collection") {
    std::vector<std::string> const texts{"aba", "ab"};
    FMIndex fm(texts, 1);
    IdRange const all{1, 2};
    using V = std::vector<TextId>;
    CHECK(fm.report(TextPredicate::StartsWith, "ab", all) == V{1, 2});
    CHECK(fm.report(TextPredicate::StartsWith, "", all) == V{1, 2});
    CHECK(fm.report(TextPredicate::StartsWith, "b", all).empty());
    CHECK(fm.report(TextPredicate::EndsWith, "ba", all) == V{1});
    CHECK(fm.report(TextPredicate::EndsWith, "", all) == V{1, 2});
    CHECK(fm.report(TextPredicate::EndsWith, "aba", all) == V{1});
    CHECK(fm.report(TextPredicate::Equals, "ab", all) == V{2});
    CHECK(fm.report(TextPredicate::Equals, "aba", all) == V{1});
    CHECK(fm.report(TextPredicate::Equals, "abc", all).empty());
    CHECK(fm.report(TextPredicate::Contains, "ab", all) == V{1, 2});
    CHECK(fm.count_all_occurrences("ab") == 2);
    CHECK(fm.report(TextPredicate::Contains, "aa", all).empty());
    CHECK(fm.report(TextPredicate::Contains, "a", {2, 2}) == V{2});
    CHECK(fm.report(TextPredicate::LessEqual, "ab", all) == V{2});
    CHECK(fm.report(TextPredicate::GreaterEqual, "", all) == V{1, 2});
    CHECK(fm.report(TextPredicate::Less, "ab", all).empty());
    CHECK(fm.count(TextPredicate::StartsWith, "a", all) == 2);
    CHECK(fm.exists(TextPredicate::Equals, "ab", {1, 1}) == false);
}

TEST_CASE("doc covers every text") {
    std::mt19937_64 rng(11);
    auto const texts = random_texts(rng, 40, 6, "ab");
    FMIndex fm(texts);
    std::set<TextId> ids;
    for (std::size_t j = 1; j <= fm.text_count(); ++j) ids.insert(fm.doc(j));
    CHECK(ids.size() == texts.size());
    CHECK(*ids.begin() == 1);
    CHECK(*ids.rbegin() == texts.size());
}

TEST_CASE("random collections agree with the naive oracle") {
    std::mt19937_64 rng(2024);
    for (int round = 0; round < 12; ++round) {
        std::string const alphabet = round % 3 == 0 ? "ab" : (round % 3 == 1 ? "abc" : "a b\x01\xff");
        auto const texts = random_texts(rng, 1 + rng() % 25, 1 + rng() % 9, alphabet);
        std::size_t const rate = std::vector<std::size_t>{1, 4, 64}[round % 3];
        FMIndex fm(texts, rate);
        check_against_oracle(texts, fm);
        for (std::size_t i = 0; i < texts.size(); ++i) CHECK(fm.extract(static_cast<TextId>(i + 1)) == texts[i]);

        // Every substring of the collection plus a few absent patterns.
        std::set<std::string> patterns{"", "zz", "aaaaaaaaaaaaa"};
        for (auto const& t : texts)
            for (std::size_t i = 0; i < t.size(); ++i)
                for (std::size_t k = 1; i + k <= t.size(); ++k) patterns.insert(t.substr(i, k));
        for (auto const& p : patterns) {
            if (!p.empty()) CHECK(fm.count_all_occurrences(p) == naive_occurrences(texts, p));
            std::uniform_int_distribution<TextId> id(1, static_cast<TextId>(texts.size()));
            TextId x = id(rng), y = id(rng);
            if (x > y) std::swap(x, y);
            for (auto pred : kAllPredicates) {
                auto const expected = naive_report(texts, pred, p, {x, y});
                CAPTURE(p);
                CAPTURE(static_cast<int>(pred));
                CHECK(fm.report(pred, p, {x, y}) == expected);
                CHECK(fm.count(pred, p, {x, y}) == expected.size());
                CHECK(fm.exists(pred, p, {x, y}) == !expected.empty());
            }
        }
    }
}

TEST_CASE("sampling rate changes no answer") {
    std::mt19937_64 rng(5);
    auto const texts = random_texts(rng, 60, 200, "abcd");
    FMIndex f1(texts, 1), f4(texts, 4), f64(texts, 64);
    for (std::string p : {"a", "ab", "dcb", "abca", "b"}) {
        for (auto pred : kAllPredicates) {
            auto const r = f1.report(pred, p, {3, 50});
            CHECK(f4.report(pred, p, {3, 50}) == r);
            CHECK(f64.report(pred, p, {3, 50}) == r);
        }
    }
    for (std::size_t row = 1; row <= f1.length(); row += 7) {
        CHECK(f1.locate(row) == f4.locate(row));
        CHECK(f1.locate(row) == f64.locate(row));
    }
}

TEST_CASE("larger collection inverts") {
    std::mt19937_64 rng(99);
    auto const texts = random_texts(rng, 500, 400, "etaoin shrdlu");
    FMIndex fm(texts);
    for (std::size_t i = 0; i < texts.size(); ++i) REQUIRE(fm.extract(static_cast<TextId>(i + 1)) == texts[i]);
    PlainTextStore plain(texts);
    TextSource via_plain(&fm, &plain), via_fm(&fm, nullptr);
    for (TextId id : {1u, 250u, 500u}) {
        CHECK(via_plain.extract_text(id) == texts[id - 1]);
        CHECK(via_fm.extract_text(id) == texts[id - 1]);
    }
}

TEST_CASE("rejects bad input") {
    CHECK_THROWS_AS(FMIndex(std::vector<std::string>{}), std::invalid_argument);
    CHECK_THROWS_AS(FMIndex(std::vector<std::string>{std::string("a\0b", 3)}), std::invalid_argument);
}

TEST_CASE("serialization round trip") {
    std::mt19937_64 rng(3);
    auto const texts = random_texts(rng, 30, 20, "xyz");
    FMIndex fm(texts, 4);
    PlainTextStore plain(texts);
    Writer w;
    fm.save(w);
    plain.save(w);
    auto const bytes = w.take();
    Reader r(bytes);
    auto const fm2 = FMIndex::load(r);
    auto const plain2 = PlainTextStore::load(r);
    CHECK(r.at_end());
    for (std::size_t i = 0; i < texts.size(); ++i) {
        CHECK(fm2.extract(static_cast<TextId>(i + 1)) == texts[i]);
        CHECK(plain2.text(static_cast<TextId>(i + 1)) == texts[i]);
    }
    CHECK(fm2.report(TextPredicate::Contains, "xy", {1, 30}) == fm.report(TextPredicate::Contains, "xy", {1, 30}));
    auto truncated = bytes;
    truncated.resize(bytes.size() / 2);
    Reader bad(truncated);
    CHECK_THROWS_AS(FMIndex::load(bad), FormatError);
}
