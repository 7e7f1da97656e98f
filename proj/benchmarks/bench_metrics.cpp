// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 skillopt contributors

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "skillopt/eval.hpp"

using namespace skillopt;

namespace {

std::vector<TaskEval> synthetic_report(int n_tasks, std::mt19937_64& rng) {
    std::vector<TaskEval> tasks;
    for (int t = 0; t < n_tasks; ++t) {
        TaskEval task;
        task.task_id = "t" + std::to_string(t);
        task.baseline_private_ms = 100.0;
        for (int c = 0; c < 8; ++c) {
            RunResult r;
            r.candidate_id = task.task_id + "-c" + std::to_string(c);
            r.passed_public = rng() % 4 != 0;
            if (r.passed_public) r.public_runtime_mean = static_cast<double>(rng() % 100) + 1.0;
            r.passed_private = r.passed_public && rng() % 3 != 0;
            if (r.passed_private)
                r.private_runtime_mean = 30.0 + static_cast<double>(rng() % 120);
            task.results.push_back(std::move(r));
        }
        task.ranking = rank_candidates(task.results);
        tasks.push_back(std::move(task));
    }
    return tasks;
}

}  // namespace

static void BM_OptAtK(benchmark::State& state) {
    std::mt19937_64 rng(11);
    const auto tasks = synthetic_report(static_cast<int>(state.range(0)), rng);
    for (auto _ : state)
        for (int k = 1; k <= 8; ++k) benchmark::DoNotOptimize(opt_at_k(tasks, k));
}
BENCHMARK(BM_OptAtK)->Arg(100)->Arg(623);

static void BM_PairedBootstrap(benchmark::State& state) {
    std::mt19937_64 rng(12);
    const int n = static_cast<int>(state.range(0));
    std::vector<double> a(n), b(n);
    for (int i = 0; i < n; ++i) {
        a[i] = static_cast<double>(rng() % 2);
        b[i] = static_cast<double>(rng() % 2);
    }
    for (auto _ : state) benchmark::DoNotOptimize(paired_bootstrap(a, b, 10000, 7));
}
BENCHMARK(BM_PairedBootstrap)->Arg(100)->Arg(623);

static void BM_SplitTests(benchmark::State& state) {
    TaskSpec spec;
    spec.task_id = "bench";
    for (int i = 0; i < 200; ++i) spec.tests.push_back({"i", "o"});
    for (auto _ : state) benchmark::DoNotOptimize(split_tests(spec, 42));
}
BENCHMARK(BM_SplitTests);

BENCHMARK_MAIN();
