// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 skillopt contributors

#include "skillopt/skill_library.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

#include "skillopt/clustering.hpp"
#include "skillopt/errors.hpp"
#include "skillopt/util.hpp"
#include "test_support.hpp"

using namespace skillopt;
using test::make_meta_skill;
using test::make_operator_skill;
using test::make_registry;

namespace {

const char* kProfileResponse = R"(```record
SharedMechanism: replace scanning loops with closed-form expressions
RepresentativeTriggers: arithmetic accumulation; range sums
```)";

const char* kCardResponse = R"(```card
Name: Replace arithmetic loops with closed forms
Description: turns range accumulations into O(1) formulas
Family: Algebraic / closed-form reformulation
Tags: algebra; loops
Triggers: arithmetic accumulation; range sums
WhenToUse: the loop only accumulates a predictable arithmetic quantity
TransformationSteps: identify the accumulated series; substitute the closed form
ExpectedComplexityEffect: O(n) -> O(1)
CommonPitfalls: integer overflow in the formula
WhenNotToUse: accumulation with data-dependent branches
MinimalExample: sum loop becomes n*(n-1)/2
```)";

const char* kMetaResponse = R"(```card
Name: Controller
Description: routes work
Overview: watches the pipeline
CoreLoop: observe; decide; act
RoutingHeuristics: match triggers against bottlenecks
BudgetingControlLogic: round-robin over routes
DecisionChecklist: confirmed bottleneck; applicable skill
```)";

ClusterMember member(const std::string& pair_id) {
    ClusterMember m;
    m.trace = {pair_id, "brief " + pair_id, "slow", "fast", "delta " + pair_id};
    m.signature = {pair_id, "loop-to-closed-form", "O(n) -> O(1)", {"trigger"}, "iteration", {}};
    return m;
}

// Independent transitive closure via boolean-matrix expansion, with cosines
// from an independently coded tf-idf (raw tf, ln((1+N)/(1+df))+1, L2).
std::vector<std::vector<size_t>> closure_oracle(const std::vector<OperatorSkill>& skills,
                                                double threshold) {
    const size_t n = skills.size();
    std::vector<std::map<std::string, double>> weights(n);
    std::map<std::string, int> df;
    std::vector<std::vector<std::string>> term_lists(n);
    for (size_t i = 0; i < n; ++i) {
        const std::string text = skills[i].name + " " + skills[i].description + " " +
                                 skills[i].when_to_use;
        std::vector<std::string> tokens;
        std::string cur;
        for (unsigned char c : text) {
            if (std::isalnum(c)) {
                cur.push_back(static_cast<char>(std::tolower(c)));
            } else if (!cur.empty()) {
                tokens.push_back(cur);
                cur.clear();
            }
        }
        if (!cur.empty()) tokens.push_back(cur);
        term_lists[i] = tokens;
        for (size_t t = 0; t + 1 < tokens.size(); ++t)
            term_lists[i].push_back(tokens[t] + " " + tokens[t + 1]);
        std::set<std::string> distinct(term_lists[i].begin(), term_lists[i].end());
        for (const auto& t : distinct) ++df[t];
    }
    for (size_t i = 0; i < n; ++i) {
        for (const auto& t : term_lists[i])
            weights[i][t] += std::log((1.0 + n) / (1.0 + df[t])) + 1.0;
        double norm = 0.0;
        for (const auto& [t, w] : weights[i]) norm += w * w;
        norm = std::sqrt(norm);
        if (norm > 0)
            for (auto& [t, w] : weights[i]) w /= norm;
    }
    auto cosine = [&](size_t a, size_t b) {
        double dot = 0.0;
        for (const auto& [t, w] : weights[a]) {
            auto it = weights[b].find(t);
            if (it != weights[b].end()) dot += w * it->second;
        }
        return dot;
    };

    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    for (size_t i = 0; i < n; ++i) {
        adj[i][i] = true;
        for (size_t j = i + 1; j < n; ++j)
            if (cosine(i, j) >= threshold) adj[i][j] = adj[j][i] = true;
    }
    for (size_t k = 0; k < n; ++k)
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j)
                if (adj[i][k] && adj[k][j]) adj[i][j] = true;

    std::vector<std::vector<size_t>> components;
    std::vector<bool> seen(n, false);
    for (size_t i = 0; i < n; ++i) {
        if (seen[i]) continue;
        std::vector<size_t> comp;
        for (size_t j = i; j < n; ++j)
            if (adj[i][j] && !seen[j]) {
                comp.push_back(j);
                seen[j] = true;
            }
        components.push_back(comp);
    }
    return components;
}

}  // namespace

TEST_CASE("summarize_cluster builds a profile from the response") {
    test::TempDir dir("skillopt-lib");
    auto backend = std::make_shared<test::ScriptedBackend>();
    backend->add_rule("cluster_summarize", "ClusterIndex: 0", kProfileResponse);
    Gateway gateway = Gateway::record(backend, dir.path / "t.jsonl");

    const auto profile =
        summarize_cluster(0, {member("p1"), member("p2"), member("p3")}, gateway);
    CHECK(profile.cluster_index == 0);
    CHECK(profile.member_pair_ids == std::vector<std::string>{"p1", "p2", "p3"});
    CHECK(profile.shared_mechanism_summary ==
          "replace scanning loops with closed-form expressions");

    SUBCASE("singleton clusters are allowed") {
        const auto single = summarize_cluster(0, {member("p9")}, gateway);
        CHECK(single.member_pair_ids.size() == 1);
    }
    SUBCASE("empty clusters violate the precondition") {
        CHECK_THROWS_AS(summarize_cluster(1, {}, gateway), InsufficientData);
    }
}

TEST_CASE("distill_operator_skill produces a complete card with a deterministic id") {
    test::TempDir dir("skillopt-lib");
    auto backend = std::make_shared<test::ScriptedBackend>();
    backend->add_rule("skill_distill", "ClusterIndex: 2", kCardResponse);
    Gateway gateway = Gateway::record(backend, dir.path / "t.jsonl");

    ClusterProfile profile;
    profile.cluster_index = 2;
    profile.member_pair_ids = {"p1", "p2"};
    profile.shared_mechanism_summary = "closed forms";
    profile.representative_triggers = {"sums"};

    const auto skill = distill_operator_skill(profile, "python", "fx", gateway);
    CHECK(skill.skill_id == "fx-op-2");
    CHECK(skill.language == "python");
    CHECK(skill.family == "Algebraic / closed-form reformulation");
    CHECK(!skill.when_to_use.empty());
    CHECK(!skill.minimal_example.empty());

    SUBCASE("missing body section names the field") {
        auto bad = std::make_shared<test::ScriptedBackend>();
        std::string response = kCardResponse;
        const auto pos = response.find("WhenNotToUse");
        response.erase(pos, response.find('\n', pos) - pos + 1);
        bad->push_response("skill_distill", response);
        bad->push_response("skill_distill", response);
        Gateway gw = Gateway::record(bad, dir.path / "t2.jsonl");
        try {
            distill_operator_skill(profile, "python", "fx", gw);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.field == "WhenNotToUse");
        }
    }
}

TEST_CASE("merge_similar joins exact duplicates and leaves disjoint cards alone") {
    test::TempDir dir("skillopt-lib");
    auto backend = std::make_shared<test::ScriptedBackend>();
    backend->add_rule("skill_merge", "Cards to merge", kCardResponse);
    Gateway gateway = Gateway::record(backend, dir.path / "t.jsonl");

    SUBCASE("two byte-identical cards become one") {
        const auto a = make_operator_skill("op-a", "replace loops with formulas",
                                           "turns loops into closed forms");
        auto b = a;
        b.skill_id = "op-b";
        const auto merged = merge_similar({a, b}, 0.8, gateway);
        REQUIRE(merged.size() == 1);
        CHECK(merged[0].skill_id == "op-a");  // keeps the first member's id
    }

    SUBCASE("cards with disjoint vocabularies pass through unchanged") {
        const auto a = make_operator_skill("op-a", "replace loops with formulas",
                                           "turns arithmetic loops into closed forms");
        auto b = make_operator_skill("op-b", "swap quadratic membership scans",
                                     "uses hashed containers against quadratic scans");
        b.when_to_use = "membership checks dominate the profile";
        const auto merged = merge_similar({a, b}, 0.8, gateway);
        REQUIRE(merged.size() == 2);
        CHECK(merged[0] == a);
        CHECK(merged[1] == b);
    }

    SUBCASE("merge-prompt parse failure keeps the component unmerged with a warning") {
        auto flaky = std::make_shared<test::ScriptedBackend>();
        flaky->push_response("skill_merge", "no card here");
        flaky->push_response("skill_merge", "still no card");
        Gateway gw = Gateway::record(flaky, dir.path / "t3.jsonl");
        const auto a = make_operator_skill("op-a", "same name", "same description");
        auto b = a;
        b.skill_id = "op-b";
        std::vector<std::string> warnings;
        const auto merged = merge_similar({a, b}, 0.8, gw, &warnings);
        CHECK(merged.size() == 2);
        REQUIRE(warnings.size() == 1);
        CHECK(warnings[0].find("unmerged") != std::string::npos);
    }
}

TEST_CASE("a similarity chain merges into a single component") {
    // a~b and b~c clear the threshold, a~c does not; the closure still joins
    // all three. b bridges by sharing each end's private vocabulary on top of
    // the common core.
    auto card = [](const std::string& id, const std::string& text) {
        auto s = make_operator_skill(id, text, text);
        s.when_to_use = text;
        return s;
    };
    std::string core, a_only, c_only;
    for (int i = 0; i < 16; ++i) core += "core" + std::to_string(i) + " ";
    for (int i = 0; i < 6; ++i) a_only += "alpha" + std::to_string(i) + " ";
    for (int i = 0; i < 6; ++i) c_only += "gamma" + std::to_string(i) + " ";
    const std::vector<OperatorSkill> skills{card("op-a", core + a_only),
                                            card("op-b", core + a_only + c_only),
                                            card("op-c", core + c_only)};

    // The fixture is only meaningful if it actually forms a chain.
    {
        std::vector<std::string> texts;
        for (const auto& s : skills) texts.push_back(merge_similarity_text(s));
        const auto model = TfIdfModel::fit(texts);
        const auto va = model.transform(texts[0]);
        const auto vb = model.transform(texts[1]);
        const auto vc = model.transform(texts[2]);
        REQUIRE(va.dot(vb) >= 0.8);
        REQUIRE(vb.dot(vc) >= 0.8);
        REQUIRE(va.dot(vc) < 0.8);
    }

    const auto oracle = closure_oracle(skills, 0.8);
    const auto components = merge_components(skills, 0.8);
    CHECK(components == oracle);
    REQUIRE(components.size() == 1);
    CHECK(components[0] == std::vector<size_t>{0, 1, 2});
}

TEST_CASE("merge components equal the union-find closure on random libraries") {
    std::mt19937_64 rng(41);
    const std::vector<std::string> vocab = {
        "loop",  "hash",   "sort",  "index", "cache", "prefix", "suffix", "bitmask",
        "queue", "stack",  "graph", "tree",  "array", "string", "window", "state",
        "table", "branch", "merge", "scan"};
    for (int trial = 0; trial < 10; ++trial) {
        const size_t n = 2 + rng() % 31;
        std::vector<OperatorSkill> skills;
        for (size_t i = 0; i < n; ++i) {
            std::string text;
            const size_t len = 4 + rng() % 10;
            for (size_t t = 0; t < len; ++t) text += vocab[rng() % vocab.size()] + " ";
            skills.push_back(make_operator_skill("op-" + std::to_string(i), text, text));
            skills.back().when_to_use = text;
        }
        CHECK(merge_components(skills, 0.8) == closure_oracle(skills, 0.8));
    }
}

TEST_CASE("merge_similar never grows the library and is idempotent under replay") {
    test::TempDir dir("skillopt-lib");
    auto backend = std::make_shared<test::ScriptedBackend>();
    backend->add_rule("skill_merge", "Cards to merge", kCardResponse);
    Gateway gateway = Gateway::record(backend, dir.path / "t.jsonl");

    const auto a = make_operator_skill("op-a", "replace loops with formulas",
                                       "turns loops into closed forms");
    auto b = a;
    b.skill_id = "op-b";
    auto c = make_operator_skill("op-c", "swap quadratic membership scans",
                                 "uses hashed containers for membership");
    c.when_to_use = "membership checks dominate";

    const auto once = merge_similar({a, b, c}, 0.8, gateway);
    CHECK(once.size() <= 3);
    const auto twice = merge_similar(once, 0.8, gateway);
    CHECK(twice.size() <= once.size());
    CHECK(twice == once);
}

TEST_CASE("induce_meta_skills returns the three controllers") {
    test::TempDir dir("skillopt-lib");
    auto backend = std::make_shared<test::ScriptedBackend>();
    backend->add_rule("meta_induce", "Controller: diagnosis controller", kMetaResponse);
    backend->add_rule("meta_induce", "Controller: retrieval-routing controller", kMetaResponse);
    backend->add_rule("meta_induce", "Controller: plan-composition and budgeting controller",
                      kMetaResponse);
    Gateway gateway = Gateway::record(backend, dir.path / "t.jsonl");

    std::vector<OperatorSkill> ops;
    for (int i = 0; i < 5; ++i)
        ops.push_back(make_operator_skill("fx-op-" + std::to_string(i), "skill " + std::to_string(i),
                                          "mechanism " + std::to_string(i)));
    const auto metas = induce_meta_skills(ops, "python", "fx", gateway);
    REQUIRE(metas.size() == 3);
    CHECK(metas[0].skill_id == "fx-meta-1");
    CHECK(metas[1].skill_id == "fx-meta-2");
    CHECK(metas[2].skill_id == "fx-meta-3");
    for (const auto& m : metas) {
        CHECK(!m.overview.empty());
        CHECK(!m.decision_checklist.empty());
    }

    CHECK_THROWS_AS(induce_meta_skills({}, "python", "fx", gateway), InsufficientData);
}

TEST_CASE("registry round-trips losslessly") {
    test::TempDir dir("skillopt-lib");
    const auto registry = make_registry(29);
    save_registry(registry, dir.path / "registry");
    const auto loaded = load_registry(dir.path / "registry");
    CHECK(loaded == registry);
}

TEST_CASE("registry load rejects defects") {
    test::TempDir dir("skillopt-lib");
    auto registry = make_registry(3);

    SUBCASE("duplicate skill_id") {
        registry.operator_skills[1].skill_id = registry.operator_skills[0].skill_id;
        save_registry(registry, dir.path / "registry");
        CHECK_THROWS_AS(load_registry(dir.path / "registry"), LoadError);
    }

    SUBCASE("missing body section is named") {
        save_registry(registry, dir.path / "registry");
        const auto card_path = dir.path / "registry" / "fx-op-1.md";
        std::string card = util::read_file(card_path);
        const auto pos = card.find("## When not to use");
        card = card.substr(0, pos) + "## When not to use\n\n" +
               card.substr(card.find("## Minimal example"));
        util::write_file(card_path, card);
        try {
            load_registry(dir.path / "registry");
            FAIL("expected LoadError");
        } catch (const LoadError& e) {
            CHECK(std::string(e.what()).find("When not to use") != std::string::npos);
        }
    }

    SUBCASE("corrupt index") {
        save_registry(registry, dir.path / "registry");
        util::write_file(dir.path / "registry" / "index.json", "{broken");
        CHECK_THROWS_AS(load_registry(dir.path / "registry"), LoadError);
    }
}

TEST_CASE("usage_stats entropy, effective count, and shares") {
    const auto registry = make_registry(6);
    auto id = [&](int i) { return registry.operator_skills[i].skill_id; };

    SUBCASE("uniform usage over 4 skills") {
        std::vector<UsageEvent> runs;
        for (int c = 0; c < 4; ++c)
            runs.push_back({"cand" + std::to_string(c), {id(c)}});
        const auto report = usage_stats(registry, runs);
        CHECK(report.total_pairs == 4);
        CHECK(report.effective_skills == doctest::Approx(4.0).epsilon(1e-12));
        CHECK(report.top5_share_pct == doctest::Approx(100.0));
    }

    SUBCASE("all usage on one skill") {
        std::vector<UsageEvent> runs;
        for (int c = 0; c < 7; ++c)
            runs.push_back({"cand" + std::to_string(c), {id(0)}});
        const auto report = usage_stats(registry, runs);
        CHECK(report.entropy == doctest::Approx(0.0));
        CHECK(report.effective_skills == doctest::Approx(1.0));
    }

    SUBCASE("hand-computed mixed distribution") {
        // counts: id0 x10, id1 x5, id2 x5 -> p = (1/2, 1/4, 1/4)
        // H = 1.5 ln 2, e^H = 2^1.5
        std::vector<UsageEvent> runs;
        for (int c = 0; c < 10; ++c) runs.push_back({"a" + std::to_string(c), {id(0)}});
        for (int c = 0; c < 5; ++c) runs.push_back({"b" + std::to_string(c), {id(1)}});
        for (int c = 0; c < 5; ++c) runs.push_back({"c" + std::to_string(c), {id(2)}});
        const auto report = usage_stats(registry, runs);
        CHECK(report.entropy == doctest::Approx(1.0397207708399179).epsilon(1e-12));
        CHECK(report.effective_skills == doctest::Approx(2.8284271247461903).epsilon(1e-12));

        // family shares: id0 and id1 live in different default families
        double share_sum = 0.0;
        for (const auto& [family, share] : report.family_share_pct) share_sum += share;
        CHECK(share_sum == doctest::Approx(100.0).epsilon(1e-9));
        CHECK(report.family_share_pct.at(registry.operator_skills[0].family) ==
              doctest::Approx(50.0));
    }

    SUBCASE("a skill used by several plans of one candidate counts once") {
        std::vector<UsageEvent> runs{{"cand0", {id(0), id(0), id(1)}},
                                     {"cand0", {id(0)}},
                                     {"cand1", {id(0)}}};
        const auto report = usage_stats(registry, runs);
        CHECK(report.per_skill.at(id(0)) == 2);  // cand0 once, cand1 once
        CHECK(report.per_skill.at(id(1)) == 1);
        CHECK(report.total_pairs == 3);
    }

    SUBCASE("top-k share is non-decreasing in k and effective <= distinct") {
        std::vector<UsageEvent> runs;
        std::mt19937_64 rng(3);
        for (int c = 0; c < 40; ++c)
            runs.push_back({"cand" + std::to_string(c),
                            {id(static_cast<int>(rng() % 6))}});
        const auto report = usage_stats(registry, runs);
        CHECK(report.effective_skills <= report.per_skill.size() + 1e-9);
        // top5 covers at least as much as any 5 individual shares
        double max_single = 0.0;
        for (const auto& [skill, count] : report.per_skill)
            max_single = std::max(max_single, 100.0 * count / report.total_pairs);
        CHECK(report.top5_share_pct >= max_single);
    }

    SUBCASE("unknown skill id in runs") {
        std::vector<UsageEvent> runs{{"cand0", {"not-a-skill"}}};
        CHECK_THROWS_AS(usage_stats(registry, runs), ConsistencyError);
    }
}
