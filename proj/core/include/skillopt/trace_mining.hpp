// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 skillopt contributors

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "skillopt/corpus.hpp"
#include "skillopt/gateway.hpp"

namespace skillopt {

/// Structured account of one slow->fast transformation, as extracted by the
/// model. All four narrative fields are non-empty.
struct OptimizationTrace {
    std::string pair_id;
    std::string problem_brief;
    std::string slow_audit;
    std::string fast_audit;
    std::string delta_summary;

    bool operator==(const OptimizationTrace&) const = default;
};

/// Compact clusterable abstraction of a trace.
struct Signature {
    std::string pair_id;
    std::string optimization_type;
    std::string complexity_shift;
    std::vector<std::string> triggers;
    std::string bottleneck_category;
    std::vector<std::string> problem_characteristics;

    bool operator==(const Signature&) const = default;
};

struct TraceMiningOptions {
    size_t max_field_chars = 2000;  // narrative fields are capped to bound prompt sizes
    double temperature = 0.0;
};

OptimizationTrace extract_trace(const SolutionPair& pair, Gateway& gateway,
                                const TraceMiningOptions& options = {});

Signature abstract_signature(const OptimizationTrace& trace, Gateway& gateway,
                             const TraceMiningOptions& options = {});

/// Canonical clustering text: optimization_type, complexity_shift,
/// bottleneck_category, sorted triggers, sorted characteristics - lowercased,
/// whitespace collapsed, joined by single spaces, empty lists omitted.
std::string serialize_signature(const Signature& sig);

// ---- stores (JSONL checkpoints) ----

void save_traces(const std::vector<OptimizationTrace>& traces, const std::filesystem::path& path);
std::vector<OptimizationTrace> load_traces(const std::filesystem::path& path);

void save_signatures(const std::vector<Signature>& sigs, const std::filesystem::path& path);
std::vector<Signature> load_signatures(const std::filesystem::path& path);

}  // namespace skillopt
