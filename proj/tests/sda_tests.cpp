#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "ctxlab/embedding.hpp"
#include "ctxlab/report.hpp"
#include "ctxlab/semantic_dynamics.hpp"
#include "ctxlab/tokenize.hpp"

using namespace ctxlab;

namespace {

std::vector<std::string> token_texts(const TokenSequence& tokens) {
    std::vector<std::string> out;
    for (std::size_t i = 1; i <= tokens.size(); ++i)
        out.emplace_back(tokens.token(i));
    return out;
}

/// Deterministic corpus of synthetic prompts with varied length and
/// punctuation.
std::vector<std::string> test_corpus(std::size_t count) {
    static const char* vocab[] = {
        "plan",   "steps",  "goal",   "outline", "review", "format",
        "tokens", "output", "role",   "always",  "never",  "first",
        "then",   "detail", "system", "answer",  "check",  "list"};
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> length(8, 40);
    std::uniform_int_distribution<std::size_t> pick(0, std::size(vocab) - 1);
    std::uniform_int_distribution<int> punct(0, 9);
    std::vector<std::string> corpus;
    for (std::size_t i = 0; i < count; ++i) {
        std::string text;
        const int n = length(rng);
        for (int w = 0; w < n; ++w) {
            if (!text.empty()) text += ' ';
            text += vocab[pick(rng)];
            if (punct(rng) == 0) text += ',';
            if (punct(rng) == 1) text += '.';
        }
        corpus.push_back(std::move(text));
    }
    return corpus;
}

/// Fixed-geometry embedder for adversarial cases: every known text maps to a
/// pinned vector, anything else hashes through the offline reference.
class MapEmbedder : public Embedder {
  public:
    explicit MapEmbedder(std::size_t dim) : dim_(dim), fallback_(dim) {}

    void set(std::string text, std::vector<double> vector) {
        table_[std::move(text)] = EmbeddingVector(std::move(vector));
    }

    EmbeddingVector embed(const std::string& text) override {
        auto it = table_.find(text);
        if (it != table_.end()) return it->second;
        return fallback_.embed(text);
    }
    std::size_t dimension() const override { return dim_; }

  private:
    std::size_t dim_;
    OfflineEmbedder fallback_;
    std::map<std::string, EmbeddingVector> table_;
};

}  // namespace

TEST_CASE("default tokenizer splits words and keeps punctuation") {
    const auto simple = tokenize("hello world");
    CHECK(token_texts(simple) == std::vector<std::string>{"hello", "world"});

    const auto punctuated = tokenize("a, b");
    CHECK(token_texts(punctuated) == std::vector<std::string>{"a", ",", "b"});

    CHECK_THROWS_AS(tokenize(""), std::invalid_argument);
}

TEST_CASE("tokenization is lossless over the corpus") {
    for (const auto& text : test_corpus(60)) {
        const auto tokens = tokenize(text);
        CHECK(tokens.reconstruct() == text);
    }
    const auto tricky = tokenize("  spaced\tout...text!  (with) [brackets]  ");
    CHECK(tricky.reconstruct() == "  spaced\tout...text!  (with) [brackets]  ");
}

TEST_CASE("trace conventions: zero starts and zero final drift") {
    OfflineEmbedder embedder;

    const auto single = trace(tokenize("lonely"), embedder);
    REQUIRE(single.size() == 1);
    CHECK(single.delta_semantics[0] == 0.0);
    CHECK(single.global_drift[0] == 0.0);
    CHECK(single.global_delta_drift[0] == 0.0);

    const auto longer = trace(tokenize("some longer piece of text here"), embedder);
    CHECK(longer.delta_semantics[0] == 0.0);
    CHECK(longer.global_delta_drift[0] == 0.0);
    CHECK(longer.global_drift[longer.size() - 1] == 0.0);
}

TEST_CASE("a repeated word keeps every prefix at the full-text direction") {
    OfflineEmbedder embedder;
    const auto t = trace(tokenize("x x x x"), embedder);
    for (double drift : t.global_drift) CHECK(drift == 0.0);
}

TEST_CASE("telescoping: drift deltas sum to the first drift") {
    OfflineEmbedder embedder;
    for (const auto& text : test_corpus(50)) {
        const auto t = trace(tokenize(text), embedder);
        double sum = 0.0;
        for (std::size_t i = 2; i <= t.size(); ++i)
            sum += t.global_delta_drift[i - 1];
        CHECK(std::abs(sum - t.global_drift[0]) < 1e-9);
    }
}

TEST_CASE("indicator ranges hold over the corpus") {
    OfflineEmbedder embedder;
    for (const auto& text : test_corpus(30)) {
        const auto t = trace(tokenize(text), embedder);
        for (std::size_t i = 0; i < t.size(); ++i) {
            CHECK(t.delta_semantics[i] >= 0.0);
            CHECK(t.delta_semantics[i] <= 2.0);
            CHECK(t.global_drift[i] >= 0.0);
            CHECK(t.global_drift[i] <= 2.0);
            CHECK(t.global_delta_drift[i] >= -2.0);
            CHECK(t.global_delta_drift[i] <= 2.0);
        }
    }
}

TEST_CASE("span contribution against a base text") {
    OfflineEmbedder embedder;

    SUBCASE("a span drawn from the base's distribution contributes nothing") {
        CHECK(delta_semantics_span(embedder, "alpha beta alpha beta", "alpha beta") ==
              0.0);
    }

    SUBCASE("word permutations contribute equally") {
        const double ab =
            delta_semantics_span(embedder, "base words here", "alpha beta");
        const double ba =
            delta_semantics_span(embedder, "base words here", "beta alpha");
        CHECK(ab == ba);
    }

    SUBCASE("an empty base is rejected") {
        CHECK_THROWS_AS(delta_semantics_span(embedder, "", "anything"),
                        std::invalid_argument);
    }
}

TEST_CASE("segmentation finds a planted spike exactly") {
    SemanticTrace t;
    const std::size_t n = 30;
    const std::size_t spike = 15;
    for (std::size_t i = 1; i <= n; ++i) {
        t.tokens.push_back("t" + std::to_string(i));
        t.delta_semantics.push_back(0.01);
        t.global_drift.push_back(0.0);
        t.global_delta_drift.push_back(i == spike ? 0.9 : 0.01);
    }
    t.delta_semantics[0] = 0.0;
    t.global_delta_drift[0] = 0.0;

    const Segmentation seg = segment(t);
    REQUIRE(seg.boundaries.size() == 1);
    CHECK(seg.boundaries[0] == spike);
    REQUIRE(seg.segments.size() == 2);
    CHECK(seg.segments[0].start == 1);
    CHECK(seg.segments[0].end == spike - 1);
    CHECK(seg.segments[1].start == spike);
    CHECK(seg.segments[1].end == n);
}

TEST_CASE("a constant series yields a single segment") {
    SemanticTrace t;
    for (std::size_t i = 1; i <= 20; ++i) {
        t.tokens.push_back("t");
        t.delta_semantics.push_back(0.05);
        t.global_drift.push_back(0.0);
        t.global_delta_drift.push_back(i == 1 ? 0.0 : 0.05);
    }
    const Segmentation seg = segment(t);
    CHECK(seg.boundaries.empty());
    REQUIRE(seg.segments.size() == 1);
    CHECK(seg.segments[0].start == 1);
    CHECK(seg.segments[0].end == 20);
}

TEST_CASE("nearby peaks merge, keeping the larger one") {
    SemanticTrace t;
    const std::size_t n = 40;
    for (std::size_t i = 1; i <= n; ++i) {
        t.tokens.push_back("t");
        t.delta_semantics.push_back(0.01);
        t.global_drift.push_back(0.0);
        double dd = 0.01;
        if (i == 12) dd = 0.7;
        if (i == 14) dd = 0.9;  // within min_gap of 12, larger
        if (i == 30) dd = 0.8;
        t.global_delta_drift.push_back(i == 1 ? 0.0 : dd);
    }
    const Segmentation seg = segment(t);
    CHECK(seg.boundaries == std::vector<std::size_t>{14, 30});
}

TEST_CASE("trailing whitespace the tokenizer drops never moves boundaries") {
    OfflineEmbedder embedder;
    const std::string prompt =
        "first part of the text talks about one thing. second part talks "
        "about another thing entirely, with different words";
    const auto plain = segment(trace(tokenize(prompt), embedder));
    const auto padded = segment(trace(tokenize(prompt + "   \n\t  "), embedder));
    CHECK(plain.boundaries == padded.boundaries);
}

TEST_CASE("embedding failures surface the failing prefix index") {
    // Fails once prefixes get long enough: the error must say which one.
    class FragileEmbedder : public Embedder {
      public:
        EmbeddingVector embed(const std::string& text) override {
            if (text.size() > 10) throw std::runtime_error("backend down");
            return fallback_.embed(text);
        }
        std::size_t dimension() const override { return fallback_.dimension(); }

      private:
        OfflineEmbedder fallback_;
    };
    FragileEmbedder embedder;
    try {
        trace(tokenize("aa bb cc dd ee ff gg"), embedder);
        FAIL("expected an embedding failure");
    } catch (const std::runtime_error& e) {
        const std::string what = e.what();
        CHECK(what.find("prefix") != std::string::npos);
        CHECK(what.find("backend down") != std::string::npos);
    }
}

TEST_CASE("raising the threshold never adds boundaries") {
    OfflineEmbedder embedder;
    for (const auto& text : test_corpus(10)) {
        const auto t = trace(tokenize(text), embedder);
        if (t.size() < 2) continue;
        SegmentPolicy loose;
        loose.z = 2.0;
        SegmentPolicy strict;
        strict.z = 3.0;
        CHECK(segment(t, strict).boundaries.size() <=
              segment(t, loose).boundaries.size());
    }
}

TEST_CASE("inclusion check: a sub-bag span is sub-additive") {
    OfflineEmbedder embedder;
    const std::string alpha = "plan the steps of the plan carefully";
    const std::string beta = "plan steps";  // sub-bag of alpha's words
    const std::string gamma = "system role settings";
    const auto report = check_inclusion(embedder, alpha, beta, gamma);
    CHECK(report.proposition == 1);
    CHECK(report.holds);
    CHECK(report.lhs <= report.rhs);

    // Report values recompute bit-for-bit.
    const auto again = check_inclusion(embedder, alpha, beta, gamma);
    CHECK(again.lhs == report.lhs);
    CHECK(again.rhs == report.rhs);
}

TEST_CASE("inclusion check with identical operands reduces consistently") {
    OfflineEmbedder embedder;
    const auto report =
        check_inclusion(embedder, "alpha beta", "alpha beta", "base text");
    CHECK(report.lhs == delta_semantics_span(embedder, "base text",
                                             "alpha beta alpha beta"));
    CHECK(report.rhs ==
          2.0 * delta_semantics_span(embedder, "base text", "alpha beta"));
}

TEST_CASE("orthogonality check measures disjoint vocabularies as sub-additive") {
    // With unit-count hashed bags the measured quantity is
    //   lhs = 1 - sqrt(g/(g+a+b)),  rhs = 2 - 2*sqrt(g/(g+s))
    // and cos_a + cos_b - cos_ab < 1 for any disjoint split, so the
    // super-additivity inequality cannot hold here. The checker must report
    // exactly that.
    OfflineEmbedder embedder;
    std::vector<std::string> words;
    std::vector<std::size_t> buckets;
    for (int i = 0; words.size() < 6 && i < 10000; ++i) {
        std::string candidate = "tok" + std::to_string(i);
        const std::size_t bucket = embedder.bucket(candidate);
        bool clash = false;
        for (std::size_t b : buckets) clash |= (b == bucket);
        if (!clash) {
            words.push_back(candidate);
            buckets.push_back(bucket);
        }
    }
    REQUIRE(words.size() == 6);
    const std::string alpha = words[0] + " " + words[1];
    const std::string beta = words[2] + " " + words[3];
    const std::string gamma = words[4] + " " + words[5];
    const auto report = check_orthogonality(embedder, alpha, beta, gamma);
    CHECK(report.proposition == 2);

    // Closed-form oracle with g = 2 base words, a = b = 2 span words.
    const double expected_lhs = 1.0 - std::sqrt(2.0 / 6.0);
    const double expected_rhs = 2.0 * (1.0 - std::sqrt(2.0 / 4.0));
    CHECK(report.lhs == doctest::Approx(expected_lhs).epsilon(1e-12));
    CHECK(report.rhs == doctest::Approx(expected_rhs).epsilon(1e-12));
    CHECK_FALSE(report.holds);
    CHECK(report.notes.empty());
}

TEST_CASE("orthogonality check accepts geometries where the inequality holds") {
    // A real embedding space can place the pair beyond both parts; pin one.
    MapEmbedder embedder(3);
    embedder.set("g", {1.0, 0.0, 0.0});
    embedder.set("g a", {0.8, 0.6, 0.0});    // delta 0.2
    embedder.set("g b", {0.8, 0.0, 0.6});    // delta 0.2
    embedder.set("g a b", {0.0, 1.0, 0.0});  // delta 1.0 >= 0.4
    embedder.set("g b a", {0.0, 0.0, 1.0});  // swapped agrees
    const auto report = check_orthogonality(embedder, "a", "b", "g");
    CHECK(report.holds);
    CHECK(report.notes.empty());
}

TEST_CASE("orthogonality check flags order-dependent verdicts") {
    // Pin the geometry so alpha·beta passes the inequality while beta·alpha
    // fails it: only an order-sensitive embedder can do this.
    MapEmbedder embedder(3);
    embedder.set("g", {1.0, 0.0, 0.0});
    embedder.set("g a", {0.0, 1.0, 0.0});   // distance 1 from g
    embedder.set("g b", {0.0, 0.0, 1.0});   // distance 1 from g
    embedder.set("g a b", {-1.0, 0.0, 0.0});  // distance 2: lhs > rhs
    embedder.set("g b a", {1.0, 0.0, 0.0});   // distance 0: swapped < rhs
    const auto report = check_orthogonality(embedder, "a", "b", "g");
    CHECK(report.holds);
    CHECK(report.notes == "order-dependent verdict: swapped operands disagree");
}

TEST_CASE("idempotence check compares a repetition against one instance") {
    OfflineEmbedder embedder;
    // Base of three distinct-bucket words plus a single disjoint span word:
    // closed-form cosines are 3/sqrt(3*4) for one copy and 3/sqrt(3*7)
    // (count 2 in the span bucket) for two copies.
    std::vector<std::string> words;
    std::vector<std::size_t> buckets;
    for (int i = 0; words.size() < 4 && i < 10000; ++i) {
        std::string candidate = "idem" + std::to_string(i);
        const std::size_t bucket = embedder.bucket(candidate);
        bool clash = false;
        for (std::size_t b : buckets) clash |= (b == bucket);
        if (!clash) {
            words.push_back(candidate);
            buckets.push_back(bucket);
        }
    }
    REQUIRE(words.size() == 4);
    const std::string base = words[0] + " " + words[1] + " " + words[2];
    const std::string span = words[3];

    const auto report = check_idempotence(embedder, span, base, 2, 0.05);
    CHECK(report.proposition == 3);
    CHECK(report.repetitions == 2);
    CHECK(report.rhs == doctest::Approx(1.0 - 3.0 / std::sqrt(12.0)).epsilon(1e-12));
    CHECK(report.lhs == doctest::Approx(1.0 - 3.0 / std::sqrt(21.0)).epsilon(1e-12));
    // The measured difference (~0.21) exceeds a 0.05 tolerance but not 0.3.
    CHECK_FALSE(report.holds);
    CHECK(check_idempotence(embedder, span, base, 2, 0.3).holds);

    CHECK_THROWS_AS(check_idempotence(embedder, "alpha", "base", 1, 0.05),
                    std::invalid_argument);

    SUBCASE("verdict is monotone in the tolerance") {
        MapEmbedder pinned(3);
        pinned.set("g", {1.0, 0.0, 0.0});
        pinned.set("g a", {0.0, 1.0, 0.0});
        pinned.set("g a a", {0.8, 0.6, 0.0});
        const auto narrow = check_idempotence(pinned, "a", "g", 2, 0.1);
        const auto wide = check_idempotence(pinned, "a", "g", 2, 2.5);
        CHECK_FALSE(narrow.holds);
        CHECK(wide.holds);
    }
}

TEST_CASE("order-invariance difference is exactly zero offline") {
    OfflineEmbedder embedder;
    std::mt19937_64 rng(31);
    static const char* vocab[] = {"red", "green", "blue", "cyan", "teal",
                                  "pink", "gray", "gold", "jade", "rust"};
    std::uniform_int_distribution<std::size_t> pick(0, std::size(vocab) - 1);
    std::uniform_int_distribution<int> len(1, 5);
    auto random_span = [&]() {
        std::string s;
        const int n = len(rng);
        for (int i = 0; i < n; ++i) {
            if (!s.empty()) s += ' ';
            s += vocab[pick(rng)];
        }
        return s;
    };
    for (int i = 0; i < 100; ++i) {
        const auto report = check_order_invariance(
            embedder, random_span(), random_span(), random_span(), 1e-9);
        CHECK(report.lhs == report.rhs);
        CHECK(report.holds);
    }
}

TEST_CASE("order-invariance with zero tolerance demands exact equality") {
    MapEmbedder embedder(3);
    embedder.set("g", {1.0, 0.0, 0.0});
    embedder.set("g a b", {0.0, 1.0, 0.0});
    embedder.set("g b a", {0.6, 0.8, 0.0});
    const auto strict = check_order_invariance(embedder, "a", "b", "g", 0.0);
    CHECK_FALSE(strict.holds);

    OfflineEmbedder offline;
    const auto exact = check_order_invariance(offline, "x y", "z", "base", 0.0);
    CHECK_FALSE(exact.holds);  // strict inequality, even at difference zero
}

TEST_CASE("pairwise order table matches the per-cell computation") {
    OfflineEmbedder embedder;
    const std::vector<std::string> two = {"role settings", "goal settings"};
    const auto small = pairwise_order_table(embedder, two, "base");
    CHECK(std::isnan(small.values[1][0]));
    CHECK(small.values[0][1] ==
          delta_semantics_span(embedder, "base", "role settings goal settings"));

    const std::vector<std::string> four = {"role settings", "goal settings",
                                           "detailed steps", "output format"};
    const auto table = pairwise_order_table(embedder, four, "base prompt");
    std::size_t cells = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            if (j > i) {
                ++cells;
                CHECK(table.values[i][j] ==
                      delta_semantics_span(embedder, "base prompt",
                                           four[i] + " " + four[j]));
            } else {
                CHECK(std::isnan(table.values[i][j]));
            }
        }
    }
    CHECK(cells == 6);

    const std::string markdown = table.to_markdown();
    CHECK(markdown.find("| Segment 1 |") != std::string::npos);
    CHECK(markdown.find("Segment 4") != std::string::npos);
    CHECK(markdown.find(" - |") != std::string::npos);
}

TEST_CASE("parameter candidates require joint local and global salience") {
    SUBCASE("a uniform trace yields no candidates") {
        SemanticTrace t;
        for (int i = 0; i < 20; ++i) {
            t.tokens.push_back("t");
            t.delta_semantics.push_back(0.1);
            t.global_drift.push_back(0.0);
            t.global_delta_drift.push_back(0.1);
        }
        Segmentation seg;
        seg.segments = {{1, 20}};
        CHECK(parameter_candidates(t, seg).empty());
    }

    SUBCASE("an engineered spike is returned exactly") {
        SemanticTrace t;
        const std::size_t n = 30, spike = 15;
        for (std::size_t i = 1; i <= n; ++i) {
            t.tokens.push_back("t");
            t.delta_semantics.push_back(i == spike ? 0.9 : 0.01);
            t.global_drift.push_back(0.0);
            t.global_delta_drift.push_back(i == spike ? 0.9 : 0.01);
        }
        const Segmentation seg = segment(t);
        const auto candidates = parameter_candidates(t, seg);
        REQUIRE(candidates.size() == 1);
        CHECK(candidates[0].start == spike);
        CHECK(candidates[0].end == spike);
    }

    SUBCASE("candidates never cross segment boundaries") {
        SemanticTrace t;
        const std::size_t n = 24;
        for (std::size_t i = 1; i <= n; ++i) {
            t.tokens.push_back("t");
            const bool hot = i == 12 || i == 13;
            t.delta_semantics.push_back(hot ? 0.9 : 0.01);
            t.global_drift.push_back(0.0);
            t.global_delta_drift.push_back(hot ? 0.9 : 0.01);
        }
        Segmentation seg;
        seg.boundaries = {13};
        seg.segments = {{1, 12}, {13, n}};
        const auto candidates = parameter_candidates(t, seg);
        for (const auto& span : candidates) {
            bool inside_one = false;
            for (const auto& s : seg.segments)
                inside_one |= (span.start >= s.start && span.end <= s.end);
            CHECK(inside_one);
        }
        REQUIRE(candidates.size() == 2);
    }
}

TEST_CASE("reports round-trip and render deterministically") {
    OfflineEmbedder embedder;
    const std::string prompt =
        "You are an assistant for task decomposition. First outline the goal. "
        "STEPS one two three. OUTPUT only markdown, bullets only.";
    const auto tokens = tokenize(prompt);
    const auto t = trace(tokens, embedder);
    const auto seg = segment(t);
    const auto candidates = parameter_candidates(t, seg);

    const auto dir = std::filesystem::temp_directory_path() / "ctxlab_report";
    std::filesystem::remove_all(dir);
    const auto paths = emit_report(t, seg, candidates, dir);

    SUBCASE("trace.csv parses back to the in-memory trace") {
        const SemanticTrace round = read_trace_csv(paths.trace_csv);
        REQUIRE(round.size() == t.size());
        for (std::size_t i = 0; i < t.size(); ++i) {
            CHECK(round.tokens[i] == t.tokens[i]);
            CHECK(round.delta_semantics[i] ==
                  doctest::Approx(t.delta_semantics[i]).epsilon(1e-6));
            CHECK(round.global_drift[i] ==
                  doctest::Approx(t.global_drift[i]).epsilon(1e-6));
            CHECK(round.global_delta_drift[i] ==
                  doctest::Approx(t.global_delta_drift[i]).epsilon(1e-6));
        }
    }

    SUBCASE("chart has one boundary marker per segmentation boundary") {
        std::ifstream in(paths.chart_svg);
        std::stringstream buffer;
        buffer << in.rdbuf();
        const std::string svg = buffer.str();
        std::size_t count = 0, at = 0;
        while ((at = svg.find("class=\"boundary\"", at)) != std::string::npos) {
            ++count;
            at += 1;
        }
        CHECK(count == seg.boundaries.size());
        CHECK(svg.find("<script") == std::string::npos);
    }

    SUBCASE("emitting twice produces identical bytes") {
        auto read_all = [](const std::filesystem::path& p) {
            std::ifstream in(p, std::ios::binary);
            std::stringstream buffer;
            buffer << in.rdbuf();
            return buffer.str();
        };
        const std::string csv_once = read_all(paths.trace_csv);
        const std::string json_once = read_all(paths.segments_json);
        const std::string svg_once = read_all(paths.chart_svg);
        const auto again = emit_report(t, seg, candidates, dir);
        CHECK(read_all(again.trace_csv) == csv_once);
        CHECK(read_all(again.segments_json) == json_once);
        CHECK(read_all(again.chart_svg) == svg_once);
    }

    std::filesystem::remove_all(dir);
}

TEST_CASE("csv quoting survives commas in tokens") {
    OfflineEmbedder embedder;
    const auto t = trace(tokenize("a, b, and c"), embedder);
    Segmentation seg;
    seg.segments = {{1, t.size()}};
    const auto dir = std::filesystem::temp_directory_path() / "ctxlab_report_q";
    std::filesystem::remove_all(dir);
    const auto paths = emit_report(t, seg, {}, dir);
    const SemanticTrace round = read_trace_csv(paths.trace_csv);
    REQUIRE(round.size() == t.size());
    CHECK(round.tokens == t.tokens);
    std::filesystem::remove_all(dir);
}
