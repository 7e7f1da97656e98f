// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 skillopt contributors

#include "skillopt/corpus.hpp"

#include <doctest.h>

#include "skillopt/errors.hpp"
#include "skillopt/util.hpp"
#include "test_support.hpp"

using namespace skillopt;

namespace {

SolutionPair make_pair(const std::string& id, double cost_slow, double cost_fast) {
    SolutionPair p;
    p.pair_id = id;
    p.task_id = "task-" + id;
    p.language = "python";
    p.slow_code = "slow body " + id;
    p.fast_code = "fast body " + id;
    p.cost_slow = cost_slow;
    p.cost_fast = cost_fast;
    return p;
}

MiningCorpus corpus_with_ratios(const std::vector<double>& ratios) {
    MiningCorpus corpus;
    corpus.language = "python";
    for (size_t i = 0; i < ratios.size(); ++i)
        corpus.pairs.push_back(make_pair("p" + std::to_string(i + 1), ratios[i] * 2.0, 2.0));
    return corpus;
}

}  // namespace

TEST_CASE("speedup ratio is cost_slow / cost_fast") {
    CHECK(compute_speedup_ratio(make_pair("a", 4.0, 2.0)) == doctest::Approx(2.0));
    CHECK(compute_speedup_ratio(make_pair("b", 3.0, 3.0)) == doctest::Approx(1.0));
    CHECK(compute_speedup_ratio(make_pair("c", 5.0, 2.0)) == doctest::Approx(2.5));
}

TEST_CASE("speedup ratio rejects non-positive costs") {
    CHECK_THROWS_AS(compute_speedup_ratio(make_pair("a", 0.0, 2.0)), InvalidPair);
    CHECK_THROWS_AS(compute_speedup_ratio(make_pair("a", 2.0, -1.0)), InvalidPair);
}

TEST_CASE("speedup ratio is scale invariant") {
    for (double scale : {0.001, 0.5, 3.0, 1e6}) {
        auto p = make_pair("a", 5.0, 2.0);
        auto scaled = make_pair("a", 5.0 * scale, 2.0 * scale);
        CHECK(compute_speedup_ratio(scaled) == doctest::Approx(compute_speedup_ratio(p)));
    }
}

TEST_CASE("filter keeps pairs at or above the threshold, in order") {
    const auto corpus = corpus_with_ratios({1.5, 2.0, 2.5, 1.0, 8.0});
    const auto kept = filter_pairs(corpus, 2.0);
    REQUIRE(kept.pairs.size() == 3);
    CHECK(kept.pairs[0].pair_id == "p2");  // ratio exactly 2.0 stays
    CHECK(kept.pairs[1].pair_id == "p3");
    CHECK(kept.pairs[2].pair_id == "p5");
}

TEST_CASE("filter can empty a corpus and min_ratio=1 keeps everything") {
    const auto low = corpus_with_ratios({1.1, 1.9, 1.5});
    CHECK(filter_pairs(low, 2.0).pairs.empty());
    CHECK(filter_pairs(low, 1.0).pairs.size() == 3);
}

TEST_CASE("filter is idempotent and yields a subsequence") {
    const auto corpus = corpus_with_ratios({3.0, 1.2, 2.0, 9.5, 1.99, 2.01});
    const auto once = filter_pairs(corpus, 2.0);
    const auto twice = filter_pairs(once, 2.0);
    REQUIRE(once.pairs.size() == twice.pairs.size());
    for (size_t i = 0; i < once.pairs.size(); ++i) CHECK(once.pairs[i] == twice.pairs[i]);

    // Subsequence check: every kept pair appears in the input, in order.
    size_t cursor = 0;
    for (const auto& kept : once.pairs) {
        while (cursor < corpus.pairs.size() && !(corpus.pairs[cursor] == kept)) ++cursor;
        CHECK(cursor < corpus.pairs.size());
    }
}

TEST_CASE("overlap check is plain set intersection") {
    MiningCorpus corpus;
    corpus.language = "python";
    for (const char* id : {"a", "b"}) {
        auto p = make_pair(id, 4.0, 2.0);
        p.task_id = id;
        corpus.pairs.push_back(p);
    }

    CHECK(check_overlap(corpus, {"x", "y"}).empty());
    CHECK(check_overlap(corpus, {"b", "c"}) == std::set<std::string>{"b"});
    CHECK(check_overlap(corpus, {"a", "b", "c"}) == std::set<std::string>{"a", "b"});
}

TEST_CASE("manifest loading") {
    test::TempDir dir("skillopt-corpus");
    auto write = [&](const std::string& name, const std::string& body) {
        util::write_file(dir.path / name, body);
    };
    write("p1_slow.py", "for i in range(n): s += i\n");
    write("p1_fast.py", "s = n*(n-1)//2\n");
    write("p2_slow.py", "slow 2\n");
    write("p2_fast.py", "fast 2\n");
    write("p3_slow.py", "slow 3\n");
    write("p3_fast.py", "fast 3\n");
    write("p1_ctx.txt", "sum the first n integers\n");

    const std::string manifest = R"({
      "language": "python",
      "provenance": "unit fixture",
      "pairs": [
        {"pair_id": "p1", "task_id": "t1", "slow": "p1_slow.py", "fast": "p1_fast.py",
         "cost_slow": 10.0, "cost_fast": 2.0, "context": "p1_ctx.txt"},
        {"pair_id": "p2", "task_id": "t2", "slow": "p2_slow.py", "fast": "p2_fast.py",
         "cost_slow": 4.0, "cost_fast": 2.0},
        {"pair_id": "p3", "task_id": "t3", "slow": "p3_slow.py", "fast": "p3_fast.py",
         "cost_slow": 9.0, "cost_fast": 3.0}
      ]
    })";

    SUBCASE("well-formed manifest loads every referenced file") {
        write("manifest.json", manifest);
        const auto corpus = load_corpus(dir.path / "manifest.json");
        REQUIRE(corpus.pairs.size() == 3);
        CHECK(corpus.language == "python");
        CHECK(corpus.provenance == "unit fixture");
        CHECK(corpus.pairs[0].slow_code == "for i in range(n): s += i\n");
        CHECK(corpus.pairs[0].task_context == "sum the first n integers\n");
        CHECK(corpus.pairs[1].task_context.empty());
        CHECK(compute_speedup_ratio(corpus.pairs[2]) == doctest::Approx(3.0));
    }

    SUBCASE("duplicate pair_id is rejected") {
        std::string dup = manifest;
        auto pos = dup.find("\"p2\"");
        dup.replace(pos, 4, "\"p1\"");
        write("manifest.json", dup);
        CHECK_THROWS_AS(load_corpus(dir.path / "manifest.json"), DuplicateId);
    }

    SUBCASE("missing code file is a MissingFile error") {
        std::filesystem::remove(dir.path / "p3_fast.py");
        write("manifest.json", manifest);
        CHECK_THROWS_AS(load_corpus(dir.path / "manifest.json"), MissingFile);
    }

    SUBCASE("malformed manifest is a ManifestError") {
        write("manifest.json", "{not json");
        CHECK_THROWS_AS(load_corpus(dir.path / "manifest.json"), ManifestError);
        write("manifest.json", R"({"language": "python", "pairs": [{"pair_id": "p"}]})");
        CHECK_THROWS_AS(load_corpus(dir.path / "manifest.json"), ManifestError);
    }

    SUBCASE("non-positive cost violates the pair invariant") {
        std::string bad = manifest;
        auto pos = bad.find("\"cost_slow\": 4.0");
        bad.replace(pos, 16, "\"cost_slow\": 0.0");
        write("manifest.json", bad);
        CHECK_THROWS_AS(load_corpus(dir.path / "manifest.json"), InvalidPair);
    }

    SUBCASE("pair language must match the corpus") {
        std::string bad = manifest;
        auto pos = bad.find("\"task_id\": \"t2\"");
        bad.insert(pos, "\"language\": \"cpp\", ");
        write("manifest.json", bad);
        CHECK_THROWS_AS(load_corpus(dir.path / "manifest.json"), InvalidPair);
    }
}
