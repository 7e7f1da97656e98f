// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 skillopt contributors

#pragma once

#include <filesystem>
#include <map>
#include <memory>

#include "skillopt/trace_mining.hpp"
#include "skillopt/util.hpp"
#include "test_support.hpp"

namespace skillopt::test {

/// Scripted backend serving the committed end-to-end response fixtures. Rules
/// key on (template id, marker line) so the mapping survives prompt edits.
inline std::shared_ptr<ScriptedBackend> make_fixture_backend(
    const std::filesystem::path& responses_dir) {
    auto backend = std::make_shared<ScriptedBackend>();
    auto file = [&](const char* name) { return util::read_file(responses_dir / name); };

    for (const char* pair : {"p2", "p3", "p5", "p6"}) {
        const std::string needle = "PairId: " + std::string(pair) + "\n";
        backend->add_rule("trace_extract", needle, file(("trace_" + std::string(pair) + ".txt").c_str()));
        backend->add_rule("signature_abstract", needle,
                          file(("sig_" + std::string(pair) + ".txt").c_str()));
    }

    // Cluster-level prompts are keyed by a member pair id / profile phrase, so
    // the mapping is independent of which cluster index each group lands in.
    backend->add_rule("cluster_summarize", "PairId: p2", file("profile_loop.txt"));
    backend->add_rule("cluster_summarize", "PairId: p3", file("profile_loop.txt"));
    backend->add_rule("cluster_summarize", "PairId: p5", file("profile_hash.txt"));
    backend->add_rule("cluster_summarize", "PairId: p6", file("profile_hash.txt"));
    backend->add_rule("skill_distill", "closed-form expression", file("card_loop.txt"));
    backend->add_rule("skill_distill", "hashed container", file("card_hash.txt"));

    backend->add_rule("meta_induce", "Controller: diagnosis controller",
                      file("meta_diagnosis.txt"));
    backend->add_rule("meta_induce", "Controller: retrieval-routing controller",
                      file("meta_routing.txt"));
    backend->add_rule("meta_induce", "Controller: plan-composition and budgeting controller",
                      file("meta_budgeting.txt"));

    backend->add_rule("diagnose", "TaskId: t-opt-1", file("brief_t1.txt"));
    backend->add_rule("retrieve", "TaskId: t-opt-1", file("bundles_t1.txt"));
    backend->add_rule("compose_plans", "BundleIndex: 0\n", file("plans_b0.txt"));
    backend->add_rule("compose_plans", "BundleIndex: 1\n", file("plans_b1.txt"));
    backend->add_rule("compose_plans", "BundleIndex: 2\n", file("plans_b2.txt"));
    for (int slot = 0; slot < 8; ++slot)
        backend->add_rule("generate", "SlotSeed: " + std::to_string(slot) + "\n",
                          file(("gen_s" + std::to_string(slot) + ".txt").c_str()));
    return backend;
}

/// Writes the precomputed-embedding fixture for the mined signatures: the
/// closed-form pairs (p2, p3) and the hashing pairs (p5, p6) land in two
/// separated directions, keyed by the hash of each serialized signature.
inline void write_fixture_embeddings(const std::filesystem::path& signatures_path,
                                     const std::filesystem::path& out_path) {
    const auto signatures = load_signatures(signatures_path);
    std::map<std::string, std::vector<double>> direction{
        {"p2", {0.95, 0.05, 0.0, 0.0}},
        {"p3", {0.90, 0.10, 0.0, 0.0}},
        {"p5", {0.05, 0.95, 0.0, 0.0}},
        {"p6", {0.10, 0.90, 0.0, 0.0}},
    };
    std::string out;
    for (const auto& sig : signatures) {
        const auto it = direction.find(sig.pair_id);
        if (it == direction.end()) continue;
        out += "{\"hash\": \"" + util::fnv1a64_hex(serialize_signature(sig)) +
               "\", \"dim\": 4, \"values\": [";
        for (size_t i = 0; i < it->second.size(); ++i)
            out += (i ? ", " : "") + std::to_string(it->second[i]);
        out += "]}\n";
    }
    util::write_file(out_path, out);
}

}  // namespace skillopt::test
