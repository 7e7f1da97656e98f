// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 skillopt contributors

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "skillopt/clustering.hpp"
#include "skillopt/errors.hpp"
#include "skillopt/eval.hpp"
#include "skillopt/gateway.hpp"
#include "skillopt/optimizer.hpp"
#include "skillopt/skill_library.hpp"

namespace skillopt {

/// User or configuration mistake; the CLI maps it to exit code 1 (pipeline
/// failures exit 2).
struct ConfigError : Error {
    using Error::Error;
};

struct PipelineConfig {
    std::filesystem::path config_dir;  // directory of the config file; relative paths resolve here

    std::string run_id = "run";
    std::filesystem::path corpus_manifest;
    std::filesystem::path registry_dir = "registry";
    std::filesystem::path output_dir = "out";

    std::string backend = "replay";  // live | record | replay
    std::filesystem::path transcript = "transcript.jsonl";
    std::string endpoint;
    std::string model;
    std::string auth_env = "SKILLOPT_API_KEY";

    std::string embedder_mode = "file";  // file | http
    std::filesystem::path embedder_path;
    std::string embedder_endpoint;
    std::string embedder_model;

    std::uint64_t clustering_seed = 7;
    std::uint64_t split_seed = 42;
    std::uint64_t bootstrap_seed = 1234;

    int budget = 8;
    int repeats = 3;
    int bootstrap_resamples = 10000;
    double min_speedup_ratio = 2.0;
    double merge_threshold = 0.8;
    double improvement_threshold = 0.10;
    double mining_temperature = 0.0;
    double generation_temperature = 0.8;

    std::vector<std::string> runner_command;
    RunLimits limits;

    std::optional<std::filesystem::path> enforce_no_overlap;  // file of benchmark task ids

    std::filesystem::path resolve(const std::filesystem::path& p) const;
    std::filesystem::path checkpoint_dir() const;
    std::filesystem::path traces_path() const;
    std::filesystem::path signatures_path() const;
    std::filesystem::path clusters_path() const;
    std::filesystem::path candidates_dir() const;
    std::filesystem::path report_path() const;
};

PipelineConfig load_config(const std::filesystem::path& path);  // ConfigError on any defect

Gateway make_gateway(const PipelineConfig& config);             // ConfigError on bad mode
std::unique_ptr<Embedder> make_embedder(const PipelineConfig& config);

// ---------------- stage I ----------------

enum class MineStage { Traces, Signatures, Cluster, Registry, All };

std::optional<MineStage> parse_mine_stage(const std::string& name);

struct ClusterCheckpoint {
    int k = 0;
    std::uint64_t seed = 0;
    double silhouette = 0.0;
    double inertia = 0.0;
    std::vector<std::string> pair_ids;  // aligned with labels
    std::vector<int> labels;
};

struct MineSummary {
    int corpus_pairs = 0;
    int kept_pairs = 0;
    int cluster_count = 0;
    int operator_skills = 0;
    int meta_skills = 0;
    std::vector<std::string> warnings;
};

/// Runs the requested mining stage (or the whole chain), reading upstream
/// checkpoints from disk and persisting its own. A stage error aborts with the
/// stage name; completed checkpoints stay on disk so the run can resume
/// downstream.
MineSummary cmd_mine(const PipelineConfig& config, Gateway& gateway,
                     MineStage stage = MineStage::All);

// ---------------- stage II ----------------

struct OptimizeSummary {
    struct PerTask {
        std::string task_id;
        int candidates = 0;
        std::optional<std::string> error;
    };
    std::vector<PerTask> tasks;
    int failed = 0;
};

OptimizationTask load_optimization_task(const std::filesystem::path& path);

/// Optimizes each task against the configured registry and writes one
/// candidate directory per task (code files plus a provenance record).
/// Per-task failures are isolated and reported in the summary. Never invokes
/// the runner.
OptimizeSummary cmd_optimize(const PipelineConfig& config, Gateway& gateway,
                             const std::vector<std::filesystem::path>& task_files);

// ---------------- evaluation ----------------

TaskSpec load_task_spec(const std::filesystem::path& path);

/// Measures every candidate directory against its task spec through the
/// configured runner and writes report.json. Per-task infrastructure failures
/// are recorded and evaluation continues. When `compare` names another report,
/// the result carries win/loss tallies and bootstrap p-values against it.
EvalReport cmd_evaluate(const PipelineConfig& config,
                        const std::vector<std::filesystem::path>& task_files,
                        const std::optional<std::filesystem::path>& compare = std::nullopt);

/// Formats a stored report; with `compare`, win/loss and significance are
/// recomputed from the two reports' per-task data.
std::string cmd_report(const std::filesystem::path& report_path,
                       const std::optional<std::filesystem::path>& compare,
                       const PipelineConfig& config);

// ---------------- registry introspection ----------------

/// Card text of one skill, for `registry inspect`.
std::string registry_inspect(const std::filesystem::path& registry_dir,
                             const std::string& skill_id);

/// Usage events from a candidates output directory (provenance records) or a
/// JSONL file of {candidate_id, skill_ids}.
std::vector<UsageEvent> load_usage_runs(const std::filesystem::path& path);

std::string format_usage_report(const UsageReport& report);

}  // namespace skillopt
