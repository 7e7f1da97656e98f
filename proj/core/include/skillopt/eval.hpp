// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 skillopt contributors

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "skillopt/runner.hpp"

namespace skillopt {

struct TaskSpec {
    std::string task_id;
    std::vector<TestCase> tests;  // >= 2
    std::string baseline_program;  // the input program the candidates must beat
    std::string language;
};

struct SplitResult {
    std::string task_id;
    std::vector<int> public_indices;   // in shuffle order
    std::vector<int> private_indices;  // in shuffle order
    std::uint64_t seed = 42;
};

/// Seeded Fisher-Yates over the test indices (std::mt19937, j = rng() % (i+1),
/// i from N-1 down to 1); the first clamp(round(frac*N), 1, N-1) shuffled
/// indices become public. Deterministic per (N, seed) across platforms.
SplitResult split_tests(const TaskSpec& task, std::uint64_t seed = 42, double public_frac = 0.2);

/// The public-test count for N tests: clamp(round(frac*N), 1, N-1).
int public_test_count(int n_tests, double public_frac = 0.2);

struct MeasureResult {
    bool passed = false;
    std::optional<double> mean_ms;  // present iff passed
    bool timed_out = false;
};

/// Runs the program over the test subset `repeats` times. Passing requires
/// every test verdict to be Pass on every repeat; the mean is the arithmetic
/// mean over repeats of the total wall time across the subset.
MeasureResult measure_runtime(const std::string& program, const std::string& language,
                              const std::vector<TestCase>& tests, ExecutionRunner& runner,
                              int repeats = 3, const RunLimits& limits = {});

struct RunResult {
    std::string candidate_id;
    bool passed_public = false;
    bool passed_private = false;
    std::optional<double> public_runtime_mean;
    std::optional<double> private_runtime_mean;
    int repeats = 3;
    bool timeout = false;
};

/// Indices (into `results`) of the candidates passing all public tests, in
/// ascending public runtime; ties keep generation order (stable sort).
std::vector<int> rank_candidates(const std::vector<RunResult>& results);

/// Everything the metrics need to know about one evaluated task.
struct TaskEval {
    std::string task_id;
    std::optional<double> baseline_private_ms;
    std::vector<RunResult> results;  // in candidate generation order
    std::vector<int> ranking;        // indices into results
    std::optional<std::string> error;  // infrastructure failure; task excluded from metrics
};

/// Percentage of tasks where some candidate among the top-k of the ranking
/// passes all private tests with private runtime <= (1 - threshold) x the
/// baseline private runtime. The threshold is inclusive.
double opt_at_k(const std::vector<TaskEval>& tasks, int k, double improvement_threshold = 0.10);

/// OPT@k for k = 1..budget; non-decreasing in k.
std::vector<double> growth_curve(const std::vector<TaskEval>& tasks, int budget,
                                 double improvement_threshold = 0.10);

/// Best private improvement fraction of a task: max over ranked candidates
/// (top-`budget`) of 1 - private_ms/baseline_ms; nullopt when nothing passes.
std::optional<double> best_improvement(const TaskEval& task, int budget);

struct WinLoss {
    int wins = 0;
    int ties = 0;
    int losses = 0;
};

/// Per-task comparison of best private improvement; strictly larger wins,
/// both-fail (or exactly equal) is a tie. Task sets must match (by task_id).
WinLoss win_loss(const std::vector<TaskEval>& report_a, const std::vector<TaskEval>& report_b,
                 int budget);

/// Improvement buckets over per-task best improvements:
///   [0] no improvement (failed or <= 0%)   [1] (0-10%]   [2] (10-30%]
///   [3] (30-60%]                           [4] > 60%
/// Bucket counts sum to the task count.
std::array<int, 5> bucket_distribution(const std::vector<TaskEval>& tasks, int budget);

/// One-sided paired bootstrap on per-task scores: d_i = a_i - b_i, resampled
/// with replacement `resamples` times (std::mt19937_64(seed), index =
/// rng() % n per draw); p = (#{mean(d*) <= 0} + 1) / (resamples + 1).
double paired_bootstrap(const std::vector<double>& scores_a, const std::vector<double>& scores_b,
                        int resamples = 10000, std::uint64_t seed = 0);

/// Per-task binary success-at-k vector (the paired_bootstrap input for OPT@k
/// comparisons), ordered like `tasks`.
std::vector<double> success_vector(const std::vector<TaskEval>& tasks, int k,
                                   double improvement_threshold = 0.10);

struct CompareBlock {
    WinLoss win_loss;
    double p_value_top1 = 1.0;
    double p_value_topk = 1.0;
};

struct EvalReport {
    std::vector<TaskEval> tasks;
    int budget = 8;
    double improvement_threshold = 0.10;
    std::vector<double> opt_at_k_curve;  // k = 1..budget
    std::array<int, 5> buckets{};
    std::optional<CompareBlock> compare;
};

/// Fills the derived metric fields from report.tasks.
void finalize_report(EvalReport& report);

void save_report(const EvalReport& report, const std::filesystem::path& path);
EvalReport load_report(const std::filesystem::path& path);

/// Human-readable table of a report (and optional comparison block).
std::string format_report(const EvalReport& report);

}  // namespace skillopt
