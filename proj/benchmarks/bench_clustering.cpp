// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 skillopt contributors

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "skillopt/clustering.hpp"

using namespace skillopt;

namespace {

std::vector<std::string> synthetic_docs(int n, int tokens_per_doc, std::mt19937_64& rng) {
    static const char* vocab[] = {"loop",  "hash",  "sort",  "index", "cache",  "prefix",
                                  "state", "queue", "graph", "array", "window", "scan"};
    std::vector<std::string> docs;
    docs.reserve(n);
    for (int i = 0; i < n; ++i) {
        std::string doc;
        for (int t = 0; t < tokens_per_doc; ++t) {
            doc += vocab[rng() % std::size(vocab)];
            doc.push_back(' ');
        }
        docs.push_back(std::move(doc));
    }
    return docs;
}

std::vector<HybridVector> synthetic_points(int n, int dim, int blobs, std::mt19937_64& rng) {
    std::vector<HybridVector> points;
    points.reserve(n);
    for (int i = 0; i < n; ++i) {
        std::vector<double> v(dim);
        const int blob = i % blobs;
        for (int d = 0; d < dim; ++d)
            v[d] = (d == blob ? 1.0 : 0.0) +
                   (static_cast<double>(rng() % 1000) / 1000.0 - 0.5) * 0.1;
        double sq = 0.0;
        for (double x : v) sq += x * x;
        for (double& x : v) x /= std::sqrt(sq);
        HybridVector h;
        h.dense = std::move(v);
        points.push_back(std::move(h));
    }
    return points;
}

}  // namespace

static void BM_TfIdfFit(benchmark::State& state) {
    std::mt19937_64 rng(1);
    const auto docs = synthetic_docs(static_cast<int>(state.range(0)), 40, rng);
    for (auto _ : state) benchmark::DoNotOptimize(TfIdfModel::fit(docs));
}
BENCHMARK(BM_TfIdfFit)->Arg(100)->Arg(900);

static void BM_TfIdfTransform(benchmark::State& state) {
    std::mt19937_64 rng(1);
    const auto docs = synthetic_docs(900, 40, rng);
    const auto model = TfIdfModel::fit(docs);
    size_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(model.transform(docs[i++ % docs.size()]));
}
BENCHMARK(BM_TfIdfTransform);

static void BM_KMeans(benchmark::State& state) {
    std::mt19937_64 rng(2);
    const auto points =
        synthetic_points(static_cast<int>(state.range(0)), 48, 8, rng);
    for (auto _ : state) benchmark::DoNotOptimize(kmeans(points, 8, 7));
}
BENCHMARK(BM_KMeans)->Arg(128)->Arg(900);

static void BM_SilhouetteCosine(benchmark::State& state) {
    std::mt19937_64 rng(3);
    const auto points = synthetic_points(static_cast<int>(state.range(0)), 48, 8, rng);
    std::vector<int> labels(points.size());
    for (size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % 8);
    for (auto _ : state) benchmark::DoNotOptimize(silhouette_cosine(points, labels));
}
BENCHMARK(BM_SilhouetteCosine)->Arg(128)->Arg(900);

static void BM_SelectK(benchmark::State& state) {
    std::mt19937_64 rng(4);
    const auto points = synthetic_points(static_cast<int>(state.range(0)), 16, 4, rng);
    for (auto _ : state) benchmark::DoNotOptimize(select_k(points, 7));
}
BENCHMARK(BM_SelectK)->Arg(64)->Arg(256);

BENCHMARK_MAIN();
