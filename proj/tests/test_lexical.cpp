#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "desm/lexical.hpp"
#include "desm/tokenize.hpp"
#include "support/test_util.hpp"

using namespace desm;

namespace {

std::vector<TokenizedDoc> toy_docs() {
    return {{"d1", tokenize("the cat sat on the mat")},
            {"d2", tokenize("the dog chased the cat")},
            {"d3", tokenize("birds fly high")}};
}

}  // namespace

TEST_CASE("lexical index counts tf, df, lengths and the average") {
    auto index = build_lexical_index({{"d1", {"a", "b", "a"}}, {"d2", {"b", "c"}}});
    CHECK(index.doc_count() == 2);
    CHECK(index.document_frequency(index.term_id("a")) == 1);
    CHECK(index.document_frequency(index.term_id("b")) == 2);
    CHECK(index.document_frequency(index.term_id("c")) == 1);
    CHECK(index.term_frequency(index.term_id("a"), index.doc_row("d1")) == 2);
    CHECK(index.term_frequency(index.term_id("a"), index.doc_row("d2")) == 0);
    CHECK(index.doc_length(index.doc_row("d1")) == 3);
    CHECK(index.doc_length(index.doc_row("d2")) == 2);
    CHECK(index.average_doc_length() == doctest::Approx(2.5));
    CHECK(index.term_id("zz") == -1);
}

TEST_CASE("an empty document still counts toward N") {
    auto index = build_lexical_index({{"d1", {"a"}}, {"empty", {}}});
    CHECK(index.doc_count() == 2);
    CHECK(index.doc_length(index.doc_row("empty")) == 0);
    CHECK(index.average_doc_length() == doctest::Approx(0.5));
}

TEST_CASE("index statistics equal a naive recount on random docs") {
    auto rng = testutil::make_rng(61);
    std::vector<std::string> pool;
    for (int i = 0; i < 25; ++i) pool.push_back("t" + std::to_string(i));

    std::vector<TokenizedDoc> docs;
    for (int d = 0; d < 100; ++d) {
        TokenizedDoc doc;
        doc.doc_id = "d" + std::to_string(d);
        int len = static_cast<int>(rng() % 30);
        for (int i = 0; i < len; ++i) doc.tokens.push_back(pool[rng() % pool.size()]);
        docs.push_back(std::move(doc));
    }
    auto index = build_lexical_index(docs);

    std::map<std::string, std::set<std::string>> df_oracle;
    std::map<std::pair<std::string, std::string>, std::int64_t> tf_oracle;
    std::int64_t total_len = 0;
    for (const auto& doc : docs) {
        total_len += static_cast<std::int64_t>(doc.tokens.size());
        for (const auto& t : doc.tokens) {
            df_oracle[t].insert(doc.doc_id);
            ++tf_oracle[{doc.doc_id, t}];
        }
    }
    CHECK(index.doc_count() == 100);
    CHECK(index.average_doc_length() == doctest::Approx(total_len / 100.0));
    for (const auto& [term, docs_with] : df_oracle) {
        int tid = index.term_id(term);
        REQUIRE(tid >= 0);
        CHECK(index.document_frequency(tid) == static_cast<std::int64_t>(docs_with.size()));
    }
    for (const auto& [key, tf] : tf_oracle) {
        CHECK(index.term_frequency(index.term_id(key.second), index.doc_row(key.first)) == tf);
    }
}

TEST_CASE("bm25 is zero when no query term is in the document") {
    auto index = build_lexical_index(toy_docs());
    Bm25Config cfg;
    CHECK(bm25_score(tokenize("birds fly"), "d1", index, cfg) == 0.0);
    CHECK(bm25_score(tokenize("the cat"), "d3", index, cfg) == 0.0);
    CHECK(bm25_score({"notincollection"}, "d1", index, cfg) == 0.0);
}

// Frozen from an independent spreadsheet-style evaluation of the formula
// with k1 = 1.7, b = 0.95 on the toy corpus (N = 3, avgdl = 14/3).
TEST_CASE("bm25 matches hand-computed values on the toy corpus") {
    auto index = build_lexical_index(toy_docs());
    Bm25Config cfg;  // defaults: k1 = 1.7, b = 0.95
    CHECK(bm25_score(tokenize("the cat"), "d1", index, cfg) ==
          doctest::Approx(1.0112953370620593).epsilon(1e-10));
    CHECK(bm25_score(tokenize("the cat"), "d2", index, cfg) ==
          doctest::Approx(1.1159571230865975).epsilon(1e-10));
    CHECK(bm25_score(tokenize("cat mat"), "d1", index, cfg) ==
          doctest::Approx(1.2390755298086773).epsilon(1e-10));
    CHECK(bm25_score(tokenize("cat"), "d2", index, cfg) ==
          doctest::Approx(0.4507455838002995).epsilon(1e-10));
}

TEST_CASE("repeated query terms count once") {
    auto index = build_lexical_index(toy_docs());
    Bm25Config cfg;
    CHECK(bm25_score(tokenize("cat cat cat"), "d2", index, cfg) ==
          bm25_score(tokenize("cat"), "d2", index, cfg));
}

TEST_CASE("b = 0 disables length normalization") {
    // same tf for "cat" in a short and a long document
    std::vector<TokenizedDoc> docs{
        {"short", {"cat", "x"}},
        {"long", {"cat", "a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k"}}};
    auto index = build_lexical_index(docs);
    Bm25Config cfg;
    cfg.b = 0.0;
    CHECK(bm25_score({"cat"}, "short", index, cfg) ==
          doctest::Approx(bm25_score({"cat"}, "long", index, cfg)).epsilon(1e-15));

    Bm25Config with_b;
    with_b.b = 0.95;
    CHECK(bm25_score({"cat"}, "short", index, with_b) >
          bm25_score({"cat"}, "long", index, with_b));
}

TEST_CASE("bm25 grows with tf and is bounded by idf*(k1+1)") {
    Bm25Config cfg;
    std::vector<TokenizedDoc> docs;
    // same length, varying tf of "q", plus one other doc for df contrast
    for (int tf = 1; tf <= 10; ++tf) {
        TokenizedDoc d;
        d.doc_id = "d" + std::to_string(tf);
        for (int i = 0; i < tf; ++i) d.tokens.push_back("q");
        for (int i = tf; i < 12; ++i) d.tokens.push_back("filler" + std::to_string(i));
        docs.push_back(std::move(d));
    }
    docs.push_back({"other", {"nothing", "here"}});
    auto index = build_lexical_index(docs);

    double prev = 0.0;
    const auto n = static_cast<double>(index.doc_count());
    const auto df = static_cast<double>(index.document_frequency(index.term_id("q")));
    const double bound = std::log(1.0 + (n - df + 0.5) / (df + 0.5)) * (cfg.k1 + 1.0);
    for (int tf = 1; tf <= 10; ++tf) {
        double s = bm25_score({"q"}, "d" + std::to_string(tf), index, cfg);
        CHECK(s > prev);  // strictly increasing in tf at fixed length and df
        CHECK(s < bound);
        prev = s;
    }
}

TEST_CASE("bm25 of a query is the sum over its distinct single-term subqueries") {
    auto rng = testutil::make_rng(62);
    std::vector<std::string> pool;
    for (int i = 0; i < 12; ++i) pool.push_back("t" + std::to_string(i));
    std::vector<TokenizedDoc> docs;
    for (int d = 0; d < 20; ++d) {
        TokenizedDoc doc;
        doc.doc_id = "d" + std::to_string(d);
        for (int i = 0; i < 15; ++i) doc.tokens.push_back(pool[rng() % pool.size()]);
        docs.push_back(std::move(doc));
    }
    auto index = build_lexical_index(docs);
    Bm25Config cfg;

    std::vector<std::string> query{"t1", "t3", "t3", "t7", "zz"};
    std::set<std::string> distinct(query.begin(), query.end());
    for (int d = 0; d < 20; ++d) {
        std::string id = "d" + std::to_string(d);
        double whole = bm25_score(query, id, index, cfg);
        double parts = 0.0;
        for (const auto& t : distinct) parts += bm25_score({t}, id, index, cfg);
        CHECK(whole == doctest::Approx(parts).epsilon(1e-12));
    }
}

TEST_CASE("bm25 config bounds are enforced") {
    auto index = build_lexical_index(toy_docs());
    Bm25Config bad;
    bad.k1 = -0.1;
    CHECK_THROWS_AS(bm25_score({"cat"}, "d1", index, bad), std::invalid_argument);
    bad.k1 = 1.0;
    bad.b = 1.5;
    CHECK_THROWS_AS(bm25_score({"cat"}, "d1", index, bad), std::invalid_argument);
    CHECK_THROWS_AS(bm25_score({"cat"}, "nope", index, Bm25Config{}), std::invalid_argument);
}
