// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 skillopt contributors

#include "skillopt/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

#include "skillopt/errors.hpp"
#include "skillopt/util.hpp"

namespace skillopt {

using nlohmann::json;

int public_test_count(int n_tests, double public_frac) {
    const int rounded = static_cast<int>(std::lround(public_frac * n_tests));
    return std::clamp(rounded, 1, n_tests - 1);
}

SplitResult split_tests(const TaskSpec& task, std::uint64_t seed, double public_frac) {
    const int n = static_cast<int>(task.tests.size());
    if (n < 2)
        throw InsufficientTests("task " + task.task_id + " has " + std::to_string(n) +
                                " tests, need at least 2");

    std::vector<int> indices(n);
    for (int i = 0; i < n; ++i) indices[i] = i;
    // Pinned shuffle: mt19937 with modulo draws. Biased but bit-reproducible,
    // which is what the protocol needs.
    std::mt19937 rng(static_cast<std::uint32_t>(seed));
    for (int i = n - 1; i >= 1; --i) {
        const int j = static_cast<int>(rng() % static_cast<std::uint32_t>(i + 1));
        std::swap(indices[i], indices[j]);
    }

    const int n_public = public_test_count(n, public_frac);
    SplitResult split;
    split.task_id = task.task_id;
    split.seed = seed;
    split.public_indices.assign(indices.begin(), indices.begin() + n_public);
    split.private_indices.assign(indices.begin() + n_public, indices.end());
    return split;
}

MeasureResult measure_runtime(const std::string& program, const std::string& language,
                              const std::vector<TestCase>& tests, ExecutionRunner& runner,
                              int repeats, const RunLimits& limits) {
    MeasureResult result;
    double total = 0.0;
    for (int repeat = 0; repeat < repeats; ++repeat) {
        double repeat_total = 0.0;
        for (const auto& test : tests) {
            const RunOutcome outcome = runner.run(program, language, test, limits);
            if (outcome.verdict != Verdict::Pass) {
                result.timed_out = outcome.verdict == Verdict::Timeout;
                return result;  // strict pass: every test, every repeat
            }
            repeat_total += outcome.wall_ms;
        }
        total += repeat_total;
    }
    result.passed = true;
    result.mean_ms = total / repeats;
    return result;
}

std::vector<int> rank_candidates(const std::vector<RunResult>& results) {
    std::vector<int> ranked;
    for (size_t i = 0; i < results.size(); ++i)
        if (results[i].passed_public && results[i].public_runtime_mean) ranked.push_back(static_cast<int>(i));
    std::stable_sort(ranked.begin(), ranked.end(), [&](int a, int b) {
        return *results[a].public_runtime_mean < *results[b].public_runtime_mean;
    });
    return ranked;
}

namespace {

bool task_success_at_k(const TaskEval& task, int k, double threshold) {
    if (!task.baseline_private_ms) throw EvalError("task " + task.task_id + " has no baseline measurement");
    const double target = (1.0 - threshold) * *task.baseline_private_ms;
    const int limit = std::min<int>(k, static_cast<int>(task.ranking.size()));
    for (int r = 0; r < limit; ++r) {
        const RunResult& cand = task.results[task.ranking[r]];
        if (cand.passed_private && cand.private_runtime_mean && *cand.private_runtime_mean <= target)
            return true;
    }
    return false;
}

}  // namespace

double opt_at_k(const std::vector<TaskEval>& tasks, int k, double improvement_threshold) {
    if (tasks.empty()) return 0.0;
    int successes = 0;
    for (const auto& task : tasks)
        successes += task_success_at_k(task, k, improvement_threshold) ? 1 : 0;
    return 100.0 * successes / static_cast<double>(tasks.size());
}

std::vector<double> growth_curve(const std::vector<TaskEval>& tasks, int budget,
                                 double improvement_threshold) {
    std::vector<double> curve;
    curve.reserve(budget);
    for (int k = 1; k <= budget; ++k) curve.push_back(opt_at_k(tasks, k, improvement_threshold));
    return curve;
}

std::optional<double> best_improvement(const TaskEval& task, int budget) {
    if (!task.baseline_private_ms) return std::nullopt;
    std::optional<double> best;
    const int limit = std::min<int>(budget, static_cast<int>(task.ranking.size()));
    for (int r = 0; r < limit; ++r) {
        const RunResult& cand = task.results[task.ranking[r]];
        if (!cand.passed_private || !cand.private_runtime_mean) continue;
        const double improvement = 1.0 - *cand.private_runtime_mean / *task.baseline_private_ms;
        if (!best || improvement > *best) best = improvement;
    }
    return best;
}

WinLoss win_loss(const std::vector<TaskEval>& report_a, const std::vector<TaskEval>& report_b,
                 int budget) {
    if (report_a.size() != report_b.size())
        throw ShapeError("reports cover different task counts");
    std::map<std::string, const TaskEval*> b_by_id;
    for (const auto& task : report_b) b_by_id[task.task_id] = &task;

    WinLoss tally;
    for (const auto& a : report_a) {
        auto it = b_by_id.find(a.task_id);
        if (it == b_by_id.end()) throw ShapeError("task " + a.task_id + " missing from comparison report");
        const auto imp_a = best_improvement(a, budget);
        const auto imp_b = best_improvement(*it->second, budget);
        if (!imp_a && !imp_b) {
            ++tally.ties;
        } else if (imp_a && !imp_b) {
            ++tally.wins;
        } else if (!imp_a && imp_b) {
            ++tally.losses;
        } else if (*imp_a > *imp_b) {
            ++tally.wins;
        } else if (*imp_a < *imp_b) {
            ++tally.losses;
        } else {
            ++tally.ties;
        }
    }
    return tally;
}

std::array<int, 5> bucket_distribution(const std::vector<TaskEval>& tasks, int budget) {
    std::array<int, 5> buckets{};
    for (const auto& task : tasks) {
        const auto imp = best_improvement(task, budget);
        const double pct = imp ? *imp * 100.0 : -1.0;
        if (!imp || pct <= 0.0)
            ++buckets[0];  // failed or no improvement
        else if (pct <= 10.0)
            ++buckets[1];
        else if (pct <= 30.0)
            ++buckets[2];
        else if (pct <= 60.0)
            ++buckets[3];
        else
            ++buckets[4];
    }
    return buckets;
}

double paired_bootstrap(const std::vector<double>& scores_a, const std::vector<double>& scores_b,
                        int resamples, std::uint64_t seed) {
    if (scores_a.size() != scores_b.size())
        throw ShapeError("paired scores have different lengths");
    if (scores_a.empty()) throw ShapeError("paired scores are empty");

    const size_t n = scores_a.size();
    std::vector<double> diff(n);
    for (size_t i = 0; i < n; ++i) diff[i] = scores_a[i] - scores_b[i];

    std::mt19937_64 rng(seed);
    int non_positive = 0;
    for (int r = 0; r < resamples; ++r) {
        double sum = 0.0;
        for (size_t i = 0; i < n; ++i) sum += diff[rng() % n];
        if (sum <= 0.0) ++non_positive;
    }
    return (non_positive + 1.0) / (resamples + 1.0);
}

std::vector<double> success_vector(const std::vector<TaskEval>& tasks, int k,
                                   double improvement_threshold) {
    std::vector<double> out;
    out.reserve(tasks.size());
    for (const auto& task : tasks)
        out.push_back(task_success_at_k(task, k, improvement_threshold) ? 1.0 : 0.0);
    return out;
}

void finalize_report(EvalReport& report) {
    std::vector<TaskEval> usable;
    for (const auto& task : report.tasks)
        if (!task.error && task.baseline_private_ms) usable.push_back(task);
    report.opt_at_k_curve = growth_curve(usable, report.budget, report.improvement_threshold);
    report.buckets = bucket_distribution(usable, report.budget);
}

// ---------------- persistence ----------------

namespace {

json run_result_to_json(const RunResult& r) {
    json rec = {{"candidate_id", r.candidate_id},
                {"passed_public", r.passed_public},
                {"passed_private", r.passed_private},
                {"repeats", r.repeats},
                {"timeout", r.timeout}};
    if (r.public_runtime_mean) rec["public_runtime_mean"] = *r.public_runtime_mean;
    if (r.private_runtime_mean) rec["private_runtime_mean"] = *r.private_runtime_mean;
    return rec;
}

RunResult run_result_from_json(const json& rec) {
    RunResult r;
    r.candidate_id = rec.at("candidate_id").get<std::string>();
    r.passed_public = rec.at("passed_public").get<bool>();
    r.passed_private = rec.at("passed_private").get<bool>();
    r.repeats = rec.value("repeats", 3);
    r.timeout = rec.value("timeout", false);
    if (rec.contains("public_runtime_mean")) r.public_runtime_mean = rec["public_runtime_mean"].get<double>();
    if (rec.contains("private_runtime_mean"))
        r.private_runtime_mean = rec["private_runtime_mean"].get<double>();
    return r;
}

}  // namespace

void save_report(const EvalReport& report, const std::filesystem::path& path) {
    json doc = {{"budget", report.budget},
                {"improvement_threshold", report.improvement_threshold},
                {"opt_at_k", report.opt_at_k_curve},
                {"buckets", report.buckets},
                {"tasks", json::array()}};
    for (const auto& task : report.tasks) {
        json t = {{"task_id", task.task_id},
                  {"ranking", task.ranking},
                  {"results", json::array()}};
        if (task.baseline_private_ms) t["baseline_private_ms"] = *task.baseline_private_ms;
        if (task.error) t["error"] = *task.error;
        for (const auto& r : task.results) t["results"].push_back(run_result_to_json(r));
        doc["tasks"].push_back(std::move(t));
    }
    if (report.compare) {
        doc["compare"] = {{"wins", report.compare->win_loss.wins},
                          {"ties", report.compare->win_loss.ties},
                          {"losses", report.compare->win_loss.losses},
                          {"p_value_top1", report.compare->p_value_top1},
                          {"p_value_topk", report.compare->p_value_topk}};
    }
    util::write_file(path, doc.dump(2) + "\n");
}

EvalReport load_report(const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(util::read_file(path));
    } catch (const json::parse_error& e) {
        throw EvalError("report " + path.string() + " is not valid JSON: " + e.what());
    }
    EvalReport report;
    try {
        report.budget = doc.at("budget").get<int>();
        report.improvement_threshold = doc.value("improvement_threshold", 0.10);
        report.opt_at_k_curve = doc.value("opt_at_k", std::vector<double>{});
        if (doc.contains("buckets")) {
            auto b = doc["buckets"].get<std::vector<int>>();
            for (size_t i = 0; i < report.buckets.size() && i < b.size(); ++i)
                report.buckets[i] = b[i];
        }
        for (const auto& t : doc.at("tasks")) {
            TaskEval task;
            task.task_id = t.at("task_id").get<std::string>();
            task.ranking = t.value("ranking", std::vector<int>{});
            if (t.contains("baseline_private_ms"))
                task.baseline_private_ms = t["baseline_private_ms"].get<double>();
            if (t.contains("error")) task.error = t["error"].get<std::string>();
            for (const auto& r : t.value("results", json::array()))
                task.results.push_back(run_result_from_json(r));
            report.tasks.push_back(std::move(task));
        }
        if (doc.contains("compare")) {
            CompareBlock cmp;
            cmp.win_loss.wins = doc["compare"].value("wins", 0);
            cmp.win_loss.ties = doc["compare"].value("ties", 0);
            cmp.win_loss.losses = doc["compare"].value("losses", 0);
            cmp.p_value_top1 = doc["compare"].value("p_value_top1", 1.0);
            cmp.p_value_topk = doc["compare"].value("p_value_topk", 1.0);
            report.compare = cmp;
        }
    } catch (const json::exception& e) {
        throw EvalError("report " + path.string() + ": " + e.what());
    }
    return report;
}

std::string format_report(const EvalReport& report) {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(2);

    out << "evaluated tasks: " << report.tasks.size() << "  (budget " << report.budget << ")\n";
    int errored = 0;
    for (const auto& t : report.tasks) errored += t.error ? 1 : 0;
    if (errored) out << "tasks with infrastructure errors (excluded): " << errored << "\n";

    out << "\nOPT@k (improvement threshold " << report.improvement_threshold * 100 << "%)\n";
    for (size_t k = 0; k < report.opt_at_k_curve.size(); ++k)
        out << "  OPT@" << k + 1 << " = " << report.opt_at_k_curve[k] << "%\n";

    static const char* bucket_names[5] = {"no improvement", "(0-10%]", "(10-30%]", "(30-60%]",
                                          ">60%"};
    out << "\nbest-improvement distribution\n";
    for (size_t i = 0; i < report.buckets.size(); ++i)
        out << "  " << bucket_names[i] << ": " << report.buckets[i] << "\n";

    if (report.compare) {
        out << "\ncomparison\n";
        out << "  wins/ties/losses: " << report.compare->win_loss.wins << "/"
            << report.compare->win_loss.ties << "/" << report.compare->win_loss.losses << "\n";
        out.precision(6);
        out << "  one-sided paired bootstrap p (top-1): " << report.compare->p_value_top1 << "\n";
        out << "  one-sided paired bootstrap p (top-" << report.budget
            << "): " << report.compare->p_value_topk << "\n";
    }
    return out.str();
}

}  // namespace skillopt
