// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 skillopt contributors

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "skillopt/pipeline.hpp"
#include "skillopt/util.hpp"

namespace {

using namespace skillopt;

constexpr int kExitOk = 0;
constexpr int kExitUserError = 1;
constexpr int kExitPipelineError = 2;

struct CommonArgs {
    std::string config_path = "skillopt.json";
    std::string corpus_override;
    std::string registry_override;
    std::string transcript_override;
    std::string backend_override;
    std::string output_override;
    int budget_override = -1;
    long long seed_override = -1;
};

PipelineConfig resolve_config(const CommonArgs& args) {
    PipelineConfig cfg = load_config(args.config_path);
    if (!args.corpus_override.empty()) cfg.corpus_manifest = args.corpus_override;
    if (!args.registry_override.empty()) cfg.registry_dir = args.registry_override;
    if (!args.transcript_override.empty()) cfg.transcript = args.transcript_override;
    if (!args.backend_override.empty()) cfg.backend = args.backend_override;
    if (!args.output_override.empty()) cfg.output_dir = args.output_override;
    if (args.budget_override > 0) cfg.budget = args.budget_override;
    if (args.seed_override >= 0) cfg.clustering_seed = static_cast<std::uint64_t>(args.seed_override);
    // Flag-provided paths are relative to the invocation directory.
    if (!args.corpus_override.empty() || !args.registry_override.empty() ||
        !args.transcript_override.empty() || !args.output_override.empty()) {
        // resolve() prefixes config_dir; pre-absolutize the overridden ones.
        auto absolutize = [](std::filesystem::path& p) {
            if (!p.empty() && !p.is_absolute()) p = std::filesystem::absolute(p);
        };
        if (!args.corpus_override.empty()) absolutize(cfg.corpus_manifest);
        if (!args.registry_override.empty()) absolutize(cfg.registry_dir);
        if (!args.transcript_override.empty()) absolutize(cfg.transcript);
        if (!args.output_override.empty()) absolutize(cfg.output_dir);
    }
    return cfg;
}

void add_common_flags(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "pipeline config file (JSON)");
    cmd->add_option("--corpus", args.corpus_override, "corpus manifest override");
    cmd->add_option("--registry", args.registry_override, "registry directory override");
    cmd->add_option("--transcript", args.transcript_override, "transcript path override");
    cmd->add_option("--backend", args.backend_override, "live|record|replay override");
    cmd->add_option("--output", args.output_override, "output directory override");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"skill mining and execution-free code optimization toolkit"};
    app.require_subcommand(1);

    CommonArgs args;

    // mine [all|traces|signatures|cluster|registry]
    std::string mine_stage = "all";
    std::string overlap_ids;
    auto* mine = app.add_subcommand("mine", "run the skill-mining pipeline");
    mine->add_option("stage", mine_stage, "all|traces|signatures|cluster|registry")
        ->check(CLI::IsMember({"all", "traces", "signatures", "cluster", "registry"}));
    mine->add_option("--seed", args.seed_override, "clustering seed override");
    mine->add_option("--enforce-no-overlap", overlap_ids,
                     "abort when corpus task ids intersect this benchmark id file");
    add_common_flags(mine, args);

    // optimize --task <file>...
    std::vector<std::string> task_files;
    auto* optimize = app.add_subcommand("optimize", "generate optimization candidates per task");
    optimize->add_option("--task", task_files, "task file (repeatable)")->required();
    optimize->add_option("--budget", args.budget_override, "candidate budget override");
    add_common_flags(optimize, args);

    // evaluate --tasks <file>... [--compare report]
    std::vector<std::string> eval_tasks;
    std::string compare_path;
    auto* evaluate = app.add_subcommand("evaluate", "measure candidates through the runner");
    evaluate->add_option("--tasks", eval_tasks, "evaluation task spec file (repeatable)")
        ->required();
    evaluate->add_option("--compare", compare_path, "report to compare against");
    evaluate->add_option("--budget", args.budget_override, "candidate budget override");
    add_common_flags(evaluate, args);

    // report --report <file> [--compare report]
    std::string report_path;
    std::string report_compare;
    auto* report = app.add_subcommand("report", "render a stored evaluation report");
    report->add_option("--report", report_path, "report JSON file")->required();
    report->add_option("--compare", report_compare, "report to compare against");
    add_common_flags(report, args);

    // registry build | inspect <skill_id> | stats --runs <path>
    auto* registry = app.add_subcommand("registry", "skill registry operations");
    registry->require_subcommand(1);
    auto* reg_build = registry->add_subcommand("build", "distill the registry from checkpoints");
    add_common_flags(reg_build, args);
    std::string inspect_id;
    auto* reg_inspect = registry->add_subcommand("inspect", "print one skill card");
    reg_inspect->add_option("skill_id", inspect_id, "skill id")->required();
    add_common_flags(reg_inspect, args);
    std::string runs_path;
    auto* reg_stats = registry->add_subcommand("stats", "usage analytics over optimization runs");
    reg_stats->add_option("--runs", runs_path, "candidates directory or usage JSONL")->required();
    add_common_flags(reg_stats, args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUserError;
    }

    try {
        if (mine->parsed()) {
            PipelineConfig cfg = resolve_config(args);
            if (!overlap_ids.empty()) cfg.enforce_no_overlap = std::filesystem::absolute(overlap_ids);
            Gateway gateway = make_gateway(cfg);
            const auto stage = parse_mine_stage(mine_stage);
            const MineSummary summary = cmd_mine(cfg, gateway, *stage);
            for (const auto& w : summary.warnings) std::cerr << "warning: " << w << "\n";
            if (summary.kept_pairs)
                std::cout << "pairs kept after ratio filter: " << summary.kept_pairs << "/"
                          << summary.corpus_pairs << "\n";
            if (summary.cluster_count) std::cout << "clusters: " << summary.cluster_count << "\n";
            if (summary.operator_skills || summary.meta_skills)
                std::cout << "registry: " << summary.operator_skills << " operator + "
                          << summary.meta_skills << " meta skills\n";
            return kExitOk;
        }

        if (optimize->parsed()) {
            PipelineConfig cfg = resolve_config(args);
            Gateway gateway = make_gateway(cfg);
            std::vector<std::filesystem::path> files(task_files.begin(), task_files.end());
            const OptimizeSummary summary = cmd_optimize(cfg, gateway, files);
            for (const auto& t : summary.tasks) {
                if (t.error)
                    std::cerr << "task " << t.task_id << " failed: " << *t.error << "\n";
                else
                    std::cout << "task " << t.task_id << ": " << t.candidates << " candidates\n";
            }
            const bool all_failed = summary.failed == static_cast<int>(summary.tasks.size());
            return all_failed ? kExitPipelineError : kExitOk;
        }

        if (evaluate->parsed()) {
            PipelineConfig cfg = resolve_config(args);
            std::vector<std::filesystem::path> files(eval_tasks.begin(), eval_tasks.end());
            std::optional<std::filesystem::path> cmp;
            if (!compare_path.empty()) cmp = std::filesystem::absolute(compare_path);
            const EvalReport rpt = cmd_evaluate(cfg, files, cmp);
            std::cout << format_report(rpt);
            std::cout << "report written to " << cfg.report_path().string() << "\n";
            return kExitOk;
        }

        if (report->parsed()) {
            PipelineConfig cfg = load_config(args.config_path);
            std::optional<std::filesystem::path> cmp;
            if (!report_compare.empty()) cmp = report_compare;
            std::cout << cmd_report(report_path, cmp, cfg);
            return kExitOk;
        }

        if (registry->parsed()) {
            PipelineConfig cfg = resolve_config(args);
            if (reg_build->parsed()) {
                Gateway gateway = make_gateway(cfg);
                const MineSummary summary = cmd_mine(cfg, gateway, MineStage::Registry);
                for (const auto& w : summary.warnings) std::cerr << "warning: " << w << "\n";
                std::cout << "registry: " << summary.operator_skills << " operator + "
                          << summary.meta_skills << " meta skills\n";
            } else if (reg_inspect->parsed()) {
                std::cout << registry_inspect(cfg.resolve(cfg.registry_dir), inspect_id);
            } else if (reg_stats->parsed()) {
                const SkillRegistry reg = load_registry(cfg.resolve(cfg.registry_dir));
                const auto runs = load_usage_runs(std::filesystem::path(runs_path));
                std::cout << format_usage_report(usage_stats(reg, runs));
            }
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUserError;
    } catch (const MissingFile& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUserError;
    } catch (const ManifestError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUserError;
    } catch (const InsufficientTests& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUserError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPipelineError;
    }
    return kExitUserError;
}
