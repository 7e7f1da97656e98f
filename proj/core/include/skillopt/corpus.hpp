// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 skillopt contributors

#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

namespace skillopt {

/// One slow/fast program pair, the atom of a mining corpus. Costs are abstract
/// positive efficiency measures (wall time, instruction count, ...); the unit
/// lives in the corpus provenance, not here.
struct SolutionPair {
    std::string pair_id;
    std::string task_id;
    std::string language;
    std::string slow_code;
    std::string fast_code;
    double cost_slow = 0.0;
    double cost_fast = 0.0;
    std::string task_context;  // optional problem statement

    bool operator==(const SolutionPair&) const = default;
};

struct MiningCorpus {
    std::vector<SolutionPair> pairs;
    std::string language;
    std::string provenance;
};

/// cost_slow / cost_fast. Throws InvalidPair when either cost is non-positive.
double compute_speedup_ratio(const SolutionPair& pair);

/// Keeps exactly the pairs with speedup ratio >= min_ratio, preserving order.
/// The threshold is inclusive: a pair at exactly min_ratio stays.
MiningCorpus filter_pairs(const MiningCorpus& corpus, double min_ratio = 2.0);

/// Intersection of corpus task ids with benchmark task ids; an empty result
/// certifies mining/evaluation separation.
std::set<std::string> check_overlap(const MiningCorpus& corpus,
                                    const std::set<std::string>& benchmark_task_ids);

/// Loads a corpus from a JSON manifest. Code (and optional context) files are
/// referenced by paths relative to the manifest and read eagerly. Distinct
/// failures: MissingFile, ManifestError (malformed), DuplicateId, InvalidPair.
MiningCorpus load_corpus(const std::filesystem::path& manifest_path);

}  // namespace skillopt
