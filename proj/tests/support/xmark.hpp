#pragma once

// Synthetic auction-site documents with the XMark element vocabulary:
// site/{regions, categories, catgraph, people, open_auctions, closed_auctions}.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace sxsi::testing {

class XMarkGenerator {
public:
    XMarkGenerator(std::uint64_t seed, std::size_t target_bytes) : rng_(seed), target_(target_bytes) {}

    std::string document() {
        out_.clear();
        out_.reserve(target_ + target_ / 8);
        // Rough per-section budgets, in the proportions of the real generator.
        std::size_t const items = std::max<std::size_t>(6, target_ / 2200);
        std::size_t const people = std::max<std::size_t>(2, target_ / 4000);
        std::size_t const open = std::max<std::size_t>(2, target_ / 5000);
        std::size_t const closed = std::max<std::size_t>(2, target_ / 4500);
        std::size_t const categories = std::max<std::size_t>(2, target_ / 20000);

        out_ += "<site>";
        out_ += "<regions>";
        static char const* const regions[] = {"africa", "asia", "australia", "europe", "namerica", "samerica"};
        static double const share[] = {0.05, 0.2, 0.1, 0.3, 0.3, 0.05};
        std::size_t item_id = 0;
        for (int r = 0; r < 6; ++r) {
            open_tag(regions[r]);
            std::size_t const count = std::max<std::size_t>(1, static_cast<std::size_t>(items * share[r]));
            for (std::size_t i = 0; i < count; ++i) item(item_id++);
            close_tag(regions[r]);
        }
        out_ += "</regions>";

        out_ += "<categories>";
        for (std::size_t c = 0; c < categories; ++c) {
            out_ += "<category id=\"category" + std::to_string(c) + "\">";
            leaf("name", words(2));
            description(1);
            out_ += "</category>";
        }
        out_ += "</categories><catgraph>";
        for (std::size_t c = 0; c < categories; ++c)
            out_ += "<edge from=\"category" + std::to_string(below(categories)) + "\" to=\"category" +
                    std::to_string(below(categories)) + "\"/>";
        out_ += "</catgraph>";

        out_ += "<people>";
        for (std::size_t p = 0; p < people; ++p) person(p);
        out_ += "</people>";

        out_ += "<open_auctions>";
        for (std::size_t a = 0; a < open; ++a) open_auction(a, item_id, people);
        out_ += "</open_auctions>";

        out_ += "<closed_auctions>";
        for (std::size_t a = 0; a < closed; ++a) closed_auction(item_id, people);
        out_ += "</closed_auctions>";
        out_ += "</site>";
        return out_;
    }

private:
    bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
    std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

    std::string word() {
        static std::vector<std::string> const vocabulary = [] {
            std::vector<std::string> v{"gold",   "silver", "auction", "vintage", "rare",    "condition", "shipping",
                                       "offer",  "bid",    "quality", "antique", "modern",  "original",  "signed",
                                       "frame",  "glass",  "wooden",  "mint",    "boxed",   "collector", "estate",
                                       "lamp",   "chair",  "coin",    "stamp",   "print",   "painting",  "vase",
                                       "watch",  "ring",   "book",    "letter",  "photo",   "poster",    "map",
                                       "Unique", "great",  "small",   "large",   "perfect", "worn",      "clean"};
            return v;
        }();
        // Skewed choice so some words are frequent and others rare.
        std::size_t const k = below(vocabulary.size());
        return vocabulary[below(k + 1)];
    }

    std::string words(std::size_t n) {
        std::string s = word();
        for (std::size_t i = 1; i < n; ++i) s += " " + word();
        return s;
    }

    void open_tag(char const* name) { (out_ += "<") += name, out_ += ">"; }
    void close_tag(char const* name) { (out_ += "</") += name, out_ += ">"; }
    void leaf(char const* name, std::string const& text) {
        open_tag(name);
        out_ += text;
        close_tag(name);
    }

    // Mixed content with inline markup.
    void text(int depth = 0) {
        out_ += "<text>";
        inline_content(depth, 3 + below(8));
        out_ += "</text>";
    }

    void inline_content(int depth, std::size_t parts) {
        static char const* const markup[] = {"keyword", "emph", "bold"};
        for (std::size_t i = 0; i < parts; ++i) {
            out_ += words(1 + below(5));
            out_ += ' ';
            if (chance(0.35)) {
                char const* m = markup[below(3)];
                open_tag(m);
                if (depth < 2 && chance(0.2)) inline_content(depth + 1, 1 + below(2));
                else out_ += words(1 + below(3));
                close_tag(m);
                out_ += ' ';
            }
        }
        out_ += words(1 + below(3));
    }

    void parlist(int depth) {
        out_ += "<parlist>";
        std::size_t const n = 1 + below(4);
        for (std::size_t i = 0; i < n; ++i) {
            out_ += "<listitem>";
            if (depth < 3 && chance(0.3)) parlist(depth + 1);
            else text(depth);
            out_ += "</listitem>";
        }
        out_ += "</parlist>";
    }

    void description(int depth) {
        out_ += "<description>";
        if (chance(0.5)) parlist(depth);
        else text();
        out_ += "</description>";
    }

    std::string date() {
        return std::to_string(1 + below(12)) + "/" + std::to_string(1 + below(28)) + "/" +
               std::to_string(1998 + below(4));
    }

    void item(std::size_t id) {
        out_ += "<item id=\"item" + std::to_string(id) + "\"" + (chance(0.1) ? " featured=\"yes\"" : "") + ">";
        leaf("location", chance(0.7) ? "United States" : words(1));
        leaf("quantity", std::to_string(1 + below(3)));
        leaf("name", words(2 + below(3)));
        leaf("payment", chance(0.5) ? "Creditcard, Personal Check" : "Money order, Cash");
        description(0);
        leaf("shipping", chance(0.5) ? "Will ship internationally" : "Buyer pays fixed shipping charges");
        for (std::size_t i = 0, n = 1 + below(3); i < n; ++i)
            out_ += "<incategory category=\"category" + std::to_string(below(50)) + "\"/>";
        out_ += "<mailbox>";
        for (std::size_t i = 0, n = below(4); i < n; ++i) {
            out_ += "<mail>";
            leaf("from", words(2));
            leaf("to", words(2));
            leaf("date", date());
            text();
            out_ += "</mail>";
        }
        out_ += "</mailbox></item>";
    }

    void person(std::size_t id) {
        out_ += "<person id=\"person" + std::to_string(id) + "\">";
        leaf("name", words(2));
        leaf("emailaddress", "mailto:" + word() + "@" + word() + ".com");
        if (chance(0.5)) leaf("phone", "+" + std::to_string(below(100)) + " " + std::to_string(1000000 + below(8999999)));
        if (chance(0.5)) {
            out_ += "<address>";
            leaf("street", std::to_string(1 + below(99)) + " " + word() + " St");
            leaf("city", words(1));
            leaf("country", chance(0.6) ? "United States" : words(1));
            leaf("zipcode", std::to_string(10000 + below(89999)));
            out_ += "</address>";
        }
        if (chance(0.5)) leaf("homepage", "http://www." + word() + ".com/~" + word());
        if (chance(0.5)) leaf("creditcard", std::to_string(1000 + below(8999)) + " " + std::to_string(1000 + below(8999)));
        if (chance(0.6)) {
            out_ += "<profile income=\"" + std::to_string(10000 + below(90000)) + ".00\">";
            for (std::size_t i = 0, n = below(4); i < n; ++i)
                out_ += "<interest category=\"category" + std::to_string(below(50)) + "\"/>";
            if (chance(0.5)) leaf("education", chance(0.5) ? "College" : "Graduate School");
            if (chance(0.5)) leaf("gender", chance(0.5) ? "male" : "female");
            leaf("business", chance(0.5) ? "Yes" : "No");
            if (chance(0.5)) leaf("age", std::to_string(18 + below(60)));
            out_ += "</profile>";
        }
        if (chance(0.4)) {
            out_ += "<watches>";
            for (std::size_t i = 0, n = 1 + below(3); i < n; ++i)
                out_ += "<watch open_auction=\"open_auction" + std::to_string(below(100)) + "\"/>";
            out_ += "</watches>";
        }
        out_ += "</person>";
    }

    void annotation() {
        out_ += "<annotation>";
        out_ += "<author person=\"person" + std::to_string(below(100)) + "\"/>";
        description(0);
        leaf("happiness", std::to_string(1 + below(10)));
        out_ += "</annotation>";
    }

    void open_auction(std::size_t id, std::size_t items, std::size_t people) {
        out_ += "<open_auction id=\"open_auction" + std::to_string(id) + "\">";
        leaf("initial", std::to_string(below(200)) + "." + std::to_string(below(100)));
        if (chance(0.4)) leaf("reserve", std::to_string(below(500)) + ".00");
        for (std::size_t i = 0, n = below(5); i < n; ++i) {
            out_ += "<bidder>";
            leaf("date", date());
            leaf("time", std::to_string(below(24)) + ":" + std::to_string(10 + below(50)) + ":00");
            out_ += "<personref person=\"person" + std::to_string(below(people)) + "\"/>";
            leaf("increase", std::to_string(1 + below(30)) + ".00");
            out_ += "</bidder>";
        }
        leaf("current", std::to_string(below(500)) + ".00");
        out_ += "<itemref item=\"item" + std::to_string(below(items)) + "\"/>";
        out_ += "<seller person=\"person" + std::to_string(below(people)) + "\"/>";
        annotation();
        leaf("quantity", "1");
        leaf("type", chance(0.5) ? "Regular" : "Featured");
        out_ += "<interval>";
        leaf("start", date());
        leaf("end", date());
        out_ += "</interval></open_auction>";
    }

    void closed_auction(std::size_t items, std::size_t people) {
        out_ += "<closed_auction>";
        out_ += "<seller person=\"person" + std::to_string(below(people)) + "\"/>";
        out_ += "<buyer person=\"person" + std::to_string(below(people)) + "\"/>";
        out_ += "<itemref item=\"item" + std::to_string(below(items)) + "\"/>";
        leaf("price", std::to_string(below(500)) + ".00");
        leaf("date", date());
        leaf("quantity", "1");
        leaf("type", chance(0.5) ? "Regular" : "Featured");
        annotation();
        out_ += "</closed_auction>";
    }

    std::mt19937_64 rng_;
    std::size_t target_;
    std::string out_;
};

inline std::vector<std::string> const& xmark_tree_queries() {
    static std::vector<std::string> const q{
        "/site/regions",
        "/site/closed_auctions",
        "/site/regions/europe/item/mailbox/mail/text/keyword",
        "/site/closed_auctions/closed_auction/annotation/description/parlist/listitem",
        "/site/closed_auctions/closed_auction/annotation/description/parlist/listitem/parlist/listitem/*//keyword",
        "/site/regions/*/item",
        "//listitem//keyword",
        "/site/regions/*/item//keyword",
        "/site/regions/*/person[ address and (phone or homepage) ]",
        "//listitem[.//keyword and .//emph]//parlist",
        "/site/regions/*/item[ mailbox/mail/date ]/mailbox/mail",
        "/*[ descendant::* ]",
        "//*",
        "//*//*",
        "//*//*//*//*",
        "//*//*//*//*//*//*//*//*",
    };
    return q;
}

}  // namespace sxsi::testing
