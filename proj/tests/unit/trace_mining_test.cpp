// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 skillopt contributors

#include "skillopt/trace_mining.hpp"

#include <doctest.h>

#include "skillopt/errors.hpp"
#include "test_support.hpp"

using namespace skillopt;

namespace {

SolutionPair fixture_pair(const std::string& id) {
    SolutionPair p;
    p.pair_id = id;
    p.task_id = "task-" + id;
    p.language = "python";
    p.slow_code = "for i in range(n): s += i";
    p.fast_code = "s = n*(n-1)//2";
    p.cost_slow = 10.0;
    p.cost_fast = 2.0;
    p.task_context = "sum the integers below n";
    return p;
}

const char* kTraceResponse = R"(```record
ProblemBrief: sum integers below n
SlowAudit: linear accumulation loop
FastAudit: arithmetic series formula
DeltaSummary: loop replaced by closed form
```)";

const char* kSignatureResponse = R"(```record
OptimizationType: loop-to-closed-form
ComplexityShift: O(n) -> O(1)
Triggers: arithmetic accumulation; loop over a range
BottleneckCategory: redundant iteration
ProblemCharacteristics: numeric; closed form exists
```)";

Gateway scripted_gateway(test::TempDir& dir) {
    auto backend = std::make_shared<test::ScriptedBackend>();
    backend->add_rule("trace_extract", "PairId: p", kTraceResponse);
    backend->add_rule("signature_abstract", "PairId: p", kSignatureResponse);
    return Gateway::record(backend, dir.path / "transcript.jsonl");
}

}  // namespace

TEST_CASE("extract_trace fills the four narrative fields from the response") {
    test::TempDir dir("skillopt-mining");
    Gateway gateway = scripted_gateway(dir);
    const auto trace = extract_trace(fixture_pair("p1"), gateway);
    CHECK(trace.pair_id == "p1");
    CHECK(trace.problem_brief == "sum integers below n");
    CHECK(trace.slow_audit == "linear accumulation loop");
    CHECK(trace.fast_audit == "arithmetic series formula");
    CHECK(trace.delta_summary == "loop replaced by closed form");
}

TEST_CASE("extract_trace propagates parse errors with the pair id attached") {
    test::TempDir dir("skillopt-mining");
    auto backend = std::make_shared<test::ScriptedBackend>();
    backend->push_response("trace_extract",
                           "```record\nProblemBrief: x\nFastAudit: y\nDeltaSummary: z\n```");
    backend->push_response("trace_extract",
                           "```record\nProblemBrief: x\nFastAudit: y\nDeltaSummary: z\n```");
    Gateway gateway = Gateway::record(backend, dir.path / "t.jsonl");
    try {
        extract_trace(fixture_pair("p9"), gateway);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.field == "SlowAudit");
        CHECK(std::string(e.what()).find("p9") != std::string::npos);
    }
}

TEST_CASE("batch extraction preserves input order and pair ids") {
    test::TempDir dir("skillopt-mining");
    Gateway gateway = scripted_gateway(dir);
    std::vector<OptimizationTrace> traces;
    for (const auto& id : {"p1", "p2", "p3"})
        traces.push_back(extract_trace(fixture_pair(id), gateway));
    CHECK(traces[0].pair_id == "p1");
    CHECK(traces[1].pair_id == "p2");
    CHECK(traces[2].pair_id == "p3");
}

TEST_CASE("narrative fields are capped at the configured length") {
    test::TempDir dir("skillopt-mining");
    auto backend = std::make_shared<test::ScriptedBackend>();
    std::string long_brief(5000, 'a');
    backend->push_response("trace_extract", "```record\nProblemBrief: " + long_brief +
                                                "\nSlowAudit: s\nFastAudit: f\nDeltaSummary: d\n```");
    Gateway gateway = Gateway::record(backend, dir.path / "t.jsonl");
    TraceMiningOptions options;
    options.max_field_chars = 100;
    const auto trace = extract_trace(fixture_pair("p1"), gateway, options);
    CHECK(trace.problem_brief.size() == 100);
}

TEST_CASE("abstract_signature carries the pair id and parses all fields") {
    test::TempDir dir("skillopt-mining");
    Gateway gateway = scripted_gateway(dir);
    const auto trace = extract_trace(fixture_pair("p1"), gateway);
    const auto sig = abstract_signature(trace, gateway);
    CHECK(sig.pair_id == "p1");
    CHECK(sig.optimization_type == "loop-to-closed-form");
    CHECK(sig.complexity_shift == "O(n) -> O(1)");
    CHECK(sig.triggers == std::vector<std::string>{"arithmetic accumulation", "loop over a range"});
    CHECK(sig.bottleneck_category == "redundant iteration");
}

TEST_CASE("abstract_signature requires the bottleneck category") {
    test::TempDir dir("skillopt-mining");
    auto backend = std::make_shared<test::ScriptedBackend>();
    const char* incomplete = "```record\nOptimizationType: x\nComplexityShift: s\nTriggers: t\n```";
    backend->push_response("signature_abstract", incomplete);
    backend->push_response("signature_abstract", incomplete);
    Gateway gateway = Gateway::record(backend, dir.path / "t.jsonl");
    OptimizationTrace trace{"p1", "b", "s", "f", "d"};
    try {
        abstract_signature(trace, gateway);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.field == "BottleneckCategory");
    }
}

TEST_CASE("replay mode reproduces traces and signatures byte-identically") {
    test::TempDir dir("skillopt-mining");
    {
        Gateway recorder = scripted_gateway(dir);
        const auto trace = extract_trace(fixture_pair("p1"), recorder);
        abstract_signature(trace, recorder);
    }
    auto run = [&] {
        Gateway replay = Gateway::replay(dir.path / "transcript.jsonl");
        const auto trace = extract_trace(fixture_pair("p1"), replay);
        return std::pair{trace, abstract_signature(trace, replay)};
    };
    const auto [trace_a, sig_a] = run();
    const auto [trace_b, sig_b] = run();
    CHECK(trace_a == trace_b);
    CHECK(sig_a == sig_b);
}

TEST_CASE("serialize_signature canonical form") {
    Signature sig;
    sig.pair_id = "p1";
    sig.optimization_type = "Loop-To-Closed-Form";
    sig.complexity_shift = "O(n)  ->  O(1)";
    sig.triggers = {"zeta trigger", "alpha trigger"};
    sig.bottleneck_category = "Redundant   Iteration";
    sig.problem_characteristics = {"numeric"};

    const std::string text = serialize_signature(sig);
    CHECK(text ==
          "loop-to-closed-form o(n) -> o(1) redundant iteration alpha trigger zeta trigger "
          "numeric");

    SUBCASE("field-identical signatures serialize identically") {
        Signature copy = sig;
        copy.pair_id = "p2";  // pair id is not part of the canonical text
        CHECK(serialize_signature(copy) == text);
    }

    SUBCASE("list order does not matter") {
        Signature shuffled = sig;
        std::swap(shuffled.triggers[0], shuffled.triggers[1]);
        CHECK(serialize_signature(shuffled) == text);
    }

    SUBCASE("empty lists leave no dangling separators") {
        Signature bare = sig;
        bare.triggers.clear();
        bare.problem_characteristics.clear();
        CHECK(serialize_signature(bare) ==
              "loop-to-closed-form o(n) -> o(1) redundant iteration");
    }

    SUBCASE("changing any canonical field changes the text") {
        auto mutate = [&](auto fn) {
            Signature m = sig;
            fn(m);
            CHECK(serialize_signature(m) != text);
        };
        mutate([](Signature& s) { s.optimization_type += " extra"; });
        mutate([](Signature& s) { s.complexity_shift += " extra"; });
        mutate([](Signature& s) { s.bottleneck_category += " extra"; });
        mutate([](Signature& s) { s.triggers.push_back("fresh trigger"); });
        mutate([](Signature& s) { s.problem_characteristics.push_back("fresh trait"); });
    }
}

TEST_CASE("trace and signature stores round-trip") {
    test::TempDir dir("skillopt-mining");
    std::vector<OptimizationTrace> traces{{"p1", "brief", "slow", "fast", "delta"},
                                          {"p2", "b2", "s2", "f2", "d2"}};
    save_traces(traces, dir.path / "traces.jsonl");
    CHECK(load_traces(dir.path / "traces.jsonl") == traces);

    std::vector<Signature> sigs{{"p1", "type", "shift", {"t1"}, "cat", {"c1", "c2"}},
                                {"p2", "type2", "", {}, "cat2", {}}};
    save_signatures(sigs, dir.path / "sigs.jsonl");
    CHECK(load_signatures(dir.path / "sigs.jsonl") == sigs);
}
