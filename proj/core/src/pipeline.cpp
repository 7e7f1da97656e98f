// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 skillopt contributors

#include "skillopt/pipeline.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "skillopt/corpus.hpp"
#include "skillopt/trace_mining.hpp"
#include "skillopt/util.hpp"

namespace skillopt {

using nlohmann::json;

// ---------------- config ----------------

std::filesystem::path PipelineConfig::resolve(const std::filesystem::path& p) const {
    if (p.empty() || p.is_absolute()) return p;
    return config_dir / p;
}

std::filesystem::path PipelineConfig::checkpoint_dir() const {
    return resolve(output_dir) / "checkpoints";
}
std::filesystem::path PipelineConfig::traces_path() const {
    return checkpoint_dir() / "traces.jsonl";
}
std::filesystem::path PipelineConfig::signatures_path() const {
    return checkpoint_dir() / "signatures.jsonl";
}
std::filesystem::path PipelineConfig::clusters_path() const {
    return checkpoint_dir() / "clusters.json";
}
std::filesystem::path PipelineConfig::candidates_dir() const {
    return resolve(output_dir) / "candidates";
}
std::filesystem::path PipelineConfig::report_path() const {
    return resolve(output_dir) / "report.json";
}

PipelineConfig load_config(const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(util::read_file(path));
    } catch (const MissingFile&) {
        throw ConfigError("config file not found: " + path.string());
    } catch (const json::parse_error& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }

    PipelineConfig cfg;
    cfg.config_dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    try {
        cfg.run_id = doc.value("run_id", cfg.run_id);
        if (doc.contains("corpus")) cfg.corpus_manifest = doc["corpus"].get<std::string>();
        if (doc.contains("registry_dir")) cfg.registry_dir = doc["registry_dir"].get<std::string>();
        if (doc.contains("output_dir")) cfg.output_dir = doc["output_dir"].get<std::string>();
        cfg.backend = doc.value("backend", cfg.backend);
        if (doc.contains("transcript")) cfg.transcript = doc["transcript"].get<std::string>();
        cfg.endpoint = doc.value("endpoint", "");
        cfg.model = doc.value("model", "");
        cfg.auth_env = doc.value("auth_env", cfg.auth_env);

        if (doc.contains("embedder")) {
            const auto& e = doc["embedder"];
            cfg.embedder_mode = e.value("mode", cfg.embedder_mode);
            if (e.contains("path")) cfg.embedder_path = e["path"].get<std::string>();
            cfg.embedder_endpoint = e.value("endpoint", "");
            cfg.embedder_model = e.value("model", "");
        }
        if (doc.contains("seeds")) {
            const auto& s = doc["seeds"];
            cfg.clustering_seed = s.value("clustering", cfg.clustering_seed);
            cfg.split_seed = s.value("split", cfg.split_seed);
            cfg.bootstrap_seed = s.value("bootstrap", cfg.bootstrap_seed);
        }
        cfg.budget = doc.value("budget", cfg.budget);
        cfg.repeats = doc.value("repeats", cfg.repeats);
        cfg.bootstrap_resamples = doc.value("bootstrap_resamples", cfg.bootstrap_resamples);
        cfg.min_speedup_ratio = doc.value("min_speedup_ratio", cfg.min_speedup_ratio);
        cfg.merge_threshold = doc.value("merge_threshold", cfg.merge_threshold);
        cfg.improvement_threshold = doc.value("improvement_threshold", cfg.improvement_threshold);
        if (doc.contains("temperature")) {
            cfg.mining_temperature = doc["temperature"].value("mining", cfg.mining_temperature);
            cfg.generation_temperature =
                doc["temperature"].value("generation", cfg.generation_temperature);
        }
        cfg.runner_command = doc.value("runner", std::vector<std::string>{});
        if (doc.contains("limits")) {
            cfg.limits.wall_ms = doc["limits"].value("wall_ms", cfg.limits.wall_ms);
            cfg.limits.mem_mb = doc["limits"].value("mem_mb", cfg.limits.mem_mb);
        }
        if (doc.contains("enforce_no_overlap"))
            cfg.enforce_no_overlap = std::filesystem::path(doc["enforce_no_overlap"].get<std::string>());
    } catch (const json::exception& e) {
        throw ConfigError("config field error: " + std::string(e.what()));
    }

    if (cfg.budget < 1) throw ConfigError("budget must be >= 1");
    if (cfg.repeats < 1) throw ConfigError("repeats must be >= 1");
    if (cfg.backend != "live" && cfg.backend != "record" && cfg.backend != "replay")
        throw ConfigError("backend must be live, record, or replay (got '" + cfg.backend + "')");
    return cfg;
}

Gateway make_gateway(const PipelineConfig& config) {
    if (config.backend == "replay") {
        const auto path = config.resolve(config.transcript);
        if (!std::filesystem::exists(path))
            throw ConfigError("replay transcript not found: " + path.string());
        return Gateway::replay(path);
    }
    LiveBackendConfig live;
    live.endpoint = config.endpoint;
    live.model = config.model;
    live.auth_env = config.auth_env;
    if (live.endpoint.empty())
        throw ConfigError("backend '" + config.backend + "' requires an endpoint");
    auto backend = std::shared_ptr<Backend>(make_live_backend(live));
    if (config.backend == "record")
        return Gateway::record(backend, config.resolve(config.transcript));
    return Gateway::live(backend);
}

std::unique_ptr<Embedder> make_embedder(const PipelineConfig& config) {
    if (config.embedder_mode == "file") {
        const auto path = config.resolve(config.embedder_path);
        if (config.embedder_path.empty() || !std::filesystem::exists(path))
            throw ConfigError("file embedder needs an existing embedder.path (got '" +
                              path.string() + "')");
        return make_file_embedder(path);
    }
    if (config.embedder_mode == "http") {
        if (config.embedder_endpoint.empty())
            throw ConfigError("http embedder needs embedder.endpoint");
        return make_http_embedder(config.embedder_endpoint, config.embedder_model,
                                  config.auth_env);
    }
    throw ConfigError("embedder.mode must be file or http (got '" + config.embedder_mode + "')");
}

// ---------------- stage I ----------------

std::optional<MineStage> parse_mine_stage(const std::string& name) {
    if (name.empty() || name == "all") return MineStage::All;
    if (name == "traces") return MineStage::Traces;
    if (name == "signatures") return MineStage::Signatures;
    if (name == "cluster") return MineStage::Cluster;
    if (name == "registry") return MineStage::Registry;
    return std::nullopt;
}

namespace {

void save_cluster_checkpoint(const ClusterCheckpoint& ckpt, const std::filesystem::path& path) {
    json doc = {{"k", ckpt.k},         {"seed", ckpt.seed},   {"silhouette", ckpt.silhouette},
                {"inertia", ckpt.inertia}, {"pair_ids", ckpt.pair_ids}, {"labels", ckpt.labels}};
    util::write_file(path, doc.dump(2) + "\n");
}

ClusterCheckpoint load_cluster_checkpoint(const std::filesystem::path& path) {
    ClusterCheckpoint ckpt;
    try {
        json doc = json::parse(util::read_file(path));
        ckpt.k = doc.at("k").get<int>();
        ckpt.seed = doc.at("seed").get<std::uint64_t>();
        ckpt.silhouette = doc.value("silhouette", 0.0);
        ckpt.inertia = doc.value("inertia", 0.0);
        ckpt.pair_ids = doc.at("pair_ids").get<std::vector<std::string>>();
        ckpt.labels = doc.at("labels").get<std::vector<int>>();
    } catch (const json::exception& e) {
        throw ManifestError("cluster checkpoint " + path.string() + ": " + e.what());
    }
    return ckpt;
}

[[noreturn]] void fail_stage(const char* stage, const std::exception& e,
                             const std::filesystem::path& checkpoints) {
    throw Error(std::string("stage '") + stage + "' failed: " + e.what() +
                " (completed checkpoints under " + checkpoints.string() + " are reusable)");
}

// Reads just the language tag without pulling in every code file.
std::string corpus_language(const std::filesystem::path& manifest_path) {
    try {
        json doc = json::parse(util::read_file(manifest_path));
        return doc.at("language").get<std::string>();
    } catch (const json::exception& e) {
        throw ManifestError("manifest " + manifest_path.string() + ": " + e.what());
    }
}

void enforce_overlap_policy(const PipelineConfig& config, const MiningCorpus& corpus) {
    if (!config.enforce_no_overlap) return;
    std::set<std::string> benchmark_ids;
    for (const auto& line :
         util::split_lines(util::read_file(config.resolve(*config.enforce_no_overlap)))) {
        const std::string id = util::trim(line);
        if (!id.empty()) benchmark_ids.insert(id);
    }
    const auto overlap = check_overlap(corpus, benchmark_ids);
    if (!overlap.empty()) {
        std::string ids;
        for (const auto& id : overlap) ids += (ids.empty() ? "" : ", ") + id;
        throw ConfigError("corpus overlaps benchmark task ids: " + ids);
    }
}

}  // namespace

MineSummary cmd_mine(const PipelineConfig& config, Gateway& gateway, MineStage stage) {
    MineSummary summary;
    const auto checkpoints = config.checkpoint_dir();
    std::filesystem::create_directories(checkpoints);

    TraceMiningOptions mining;
    mining.temperature = config.mining_temperature;

    const bool all = stage == MineStage::All;

    if (all || stage == MineStage::Traces) {
        try {
            if (config.corpus_manifest.empty()) throw ConfigError("no corpus manifest configured");
            const MiningCorpus corpus = load_corpus(config.resolve(config.corpus_manifest));
            enforce_overlap_policy(config, corpus);
            summary.corpus_pairs = static_cast<int>(corpus.pairs.size());
            const MiningCorpus kept = filter_pairs(corpus, config.min_speedup_ratio);
            summary.kept_pairs = static_cast<int>(kept.pairs.size());

            std::vector<OptimizationTrace> traces;
            traces.reserve(kept.pairs.size());
            for (const auto& pair : kept.pairs)
                traces.push_back(extract_trace(pair, gateway, mining));
            save_traces(traces, config.traces_path());
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            fail_stage("traces", e, checkpoints);
        }
    }

    if (all || stage == MineStage::Signatures) {
        try {
            const auto traces = load_traces(config.traces_path());
            std::vector<Signature> signatures;
            signatures.reserve(traces.size());
            for (const auto& trace : traces)
                signatures.push_back(abstract_signature(trace, gateway, mining));
            save_signatures(signatures, config.signatures_path());
        } catch (const std::exception& e) {
            fail_stage("signatures", e, checkpoints);
        }
    }

    if (all || stage == MineStage::Cluster) {
        try {
            const auto signatures = load_signatures(config.signatures_path());
            std::vector<std::string> docs;
            docs.reserve(signatures.size());
            for (const auto& sig : signatures) docs.push_back(serialize_signature(sig));

            const auto tfidf = TfIdfModel::fit(docs);
            std::vector<SparseVec> lexical;
            lexical.reserve(docs.size());
            for (const auto& doc : docs) lexical.push_back(tfidf.transform(doc));

            auto embedder = make_embedder(config);
            const auto dense = embed(docs, *embedder);
            const auto hybrid =
                build_hybrid(lexical, static_cast<int>(tfidf.vocabulary().size()), dense);

            const int k = select_k(hybrid, config.clustering_seed);
            const auto fit = kmeans(hybrid, k, config.clustering_seed);

            ClusterCheckpoint ckpt;
            ckpt.k = fit.k;
            ckpt.seed = config.clustering_seed;
            ckpt.silhouette = fit.silhouette;
            ckpt.inertia = fit.inertia;
            for (const auto& sig : signatures) ckpt.pair_ids.push_back(sig.pair_id);
            ckpt.labels = fit.labels;
            save_cluster_checkpoint(ckpt, config.clusters_path());
            summary.cluster_count = fit.k;
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            fail_stage("cluster", e, checkpoints);
        }
    }

    if (all || stage == MineStage::Registry) {
        try {
            const auto traces = load_traces(config.traces_path());
            const auto signatures = load_signatures(config.signatures_path());
            const auto ckpt = load_cluster_checkpoint(config.clusters_path());
            summary.cluster_count = ckpt.k;

            std::map<std::string, const OptimizationTrace*> trace_by_pair;
            for (const auto& t : traces) trace_by_pair[t.pair_id] = &t;
            std::map<std::string, const Signature*> sig_by_pair;
            for (const auto& s : signatures) sig_by_pair[s.pair_id] = &s;

            std::vector<std::vector<ClusterMember>> clusters(ckpt.k);
            for (size_t i = 0; i < ckpt.pair_ids.size(); ++i) {
                const auto& pair_id = ckpt.pair_ids[i];
                if (!trace_by_pair.count(pair_id) || !sig_by_pair.count(pair_id))
                    throw ManifestError("cluster checkpoint references unknown pair " + pair_id);
                clusters.at(ckpt.labels[i])
                    .push_back({*trace_by_pair[pair_id], *sig_by_pair[pair_id]});
            }

            const std::string language = corpus_language(config.resolve(config.corpus_manifest));

            std::vector<OperatorSkill> operators;
            for (int c = 0; c < ckpt.k; ++c) {
                const auto profile = summarize_cluster(c, clusters[c], gateway);
                operators.push_back(
                    distill_operator_skill(profile, language, config.run_id, gateway));
            }
            operators =
                merge_similar(operators, config.merge_threshold, gateway, &summary.warnings);
            const auto metas =
                induce_meta_skills(operators, language, config.run_id, gateway);

            SkillRegistry registry;
            registry.operator_skills = operators;
            registry.meta_skills = metas;
            registry.provenance.run_id = config.run_id;
            registry.provenance.corpus = config.corpus_manifest.filename().string();
            registry.provenance.seed = config.clustering_seed;
            registry.provenance.cluster_count = ckpt.k;
            save_registry(registry, config.resolve(config.registry_dir));

            summary.operator_skills = static_cast<int>(registry.operator_skills.size());
            summary.meta_skills = static_cast<int>(registry.meta_skills.size());
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            fail_stage("registry", e, checkpoints);
        }
    }
    return summary;
}

// ---------------- stage II ----------------

OptimizationTask load_optimization_task(const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(util::read_file(path));
    } catch (const json::parse_error& e) {
        throw ManifestError("task file " + path.string() + ": " + e.what());
    }
    const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    OptimizationTask task;
    try {
        task.task_id = doc.at("task_id").get<std::string>();
        task.language = doc.value("language", "python");
        task.statement = doc.value("statement", "");
        if (doc.contains("program_text"))
            task.input_program = doc["program_text"].get<std::string>();
        else
            task.input_program = util::read_file(base / doc.at("program").get<std::string>());
    } catch (const json::exception& e) {
        throw ManifestError("task file " + path.string() + ": " + e.what());
    }
    if (task.input_program.empty())
        throw ManifestError("task " + task.task_id + " has an empty input program");
    return task;
}

namespace {

std::string code_extension(const std::string& language) {
    if (language == "python") return ".py";
    if (language == "cpp" || language == "c++") return ".cpp";
    return ".txt";
}

json brief_to_json(const DiagnosisBrief& brief) {
    return {{"task_id", brief.task_id},
            {"likely_bottlenecks", brief.likely_bottlenecks},
            {"dominant_operations", brief.dominant_operations},
            {"inferred_constraints", brief.inferred_constraints},
            {"optimization_scope", brief.optimization_scope}};
}

}  // namespace

OptimizeSummary cmd_optimize(const PipelineConfig& config, Gateway& gateway,
                             const std::vector<std::filesystem::path>& task_files) {
    const auto registry_dir = config.resolve(config.registry_dir);
    if (!std::filesystem::exists(registry_dir / "index.json"))
        throw ConfigError("registry not found at " + registry_dir.string() +
                          " (run `mine` or `registry build` first)");
    const SkillRegistry registry = load_registry(registry_dir);

    OptimizerOptions options;
    options.budget = config.budget;
    options.generation_temperature = config.generation_temperature;

    OptimizeSummary summary;
    for (const auto& file : task_files) {
        OptimizeSummary::PerTask per_task;
        try {
            const OptimizationTask task = load_optimization_task(file);
            per_task.task_id = task.task_id;
            const StageTwoResult result = optimize_task(task, registry, gateway, options);

            const auto task_dir = config.candidates_dir() / task.task_id;
            std::filesystem::create_directories(task_dir);

            json provenance = {{"task_id", task.task_id},
                               {"registry_run_id", registry.provenance.run_id},
                               {"budget", config.budget},
                               {"brief", brief_to_json(result.brief)},
                               {"bundles", json::array()},
                               {"plans", json::array()},
                               {"schedule", json::array()},
                               {"candidates", json::array()},
                               {"warnings", result.warnings}};
            for (const auto& bundle : result.bundles)
                provenance["bundles"].push_back({{"bundle_index", bundle.bundle_index},
                                                 {"skill_ids", bundle.skill_ids},
                                                 {"rationale", bundle.rationale}});
            for (const auto& bundle_plans : result.plans) {
                json arr = json::array();
                for (const auto& plan : bundle_plans)
                    arr.push_back({{"plan_id", plan.plan_id},
                                   {"bundle_index", plan.bundle_index},
                                   {"strategy", plan.strategy},
                                   {"anticipated_improvement", plan.anticipated_improvement},
                                   {"risks", plan.risks},
                                   {"steps", plan.step_sequence}});
                provenance["plans"].push_back(std::move(arr));
            }
            for (const auto& slot : result.schedule)
                provenance["schedule"].push_back({{"slot", slot.slot_index},
                                                  {"bundle", slot.bundle_index},
                                                  {"plan", slot.plan_index}});

            const std::string ext = code_extension(task.language);
            for (const auto& candidate : result.candidates) {
                const std::string file_name = candidate.candidate_id + ext;
                util::write_file(task_dir / file_name, candidate.code);
                provenance["candidates"].push_back({{"candidate_id", candidate.candidate_id},
                                                    {"plan_id", candidate.plan_id},
                                                    {"file", file_name},
                                                    {"skill_ids", candidate.skill_ids}});
            }
            util::write_file(task_dir / "provenance.json", provenance.dump(2) + "\n");
            per_task.candidates = static_cast<int>(result.candidates.size());
        } catch (const std::exception& e) {
            per_task.error = e.what();
            if (per_task.task_id.empty()) per_task.task_id = file.string();
            ++summary.failed;
        }
        summary.tasks.push_back(std::move(per_task));
    }
    return summary;
}

// ---------------- evaluation ----------------

TaskSpec load_task_spec(const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(util::read_file(path));
    } catch (const json::parse_error& e) {
        throw ManifestError("task spec " + path.string() + ": " + e.what());
    }
    const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    TaskSpec spec;
    try {
        spec.task_id = doc.at("task_id").get<std::string>();
        spec.language = doc.value("language", "python");
        if (doc.contains("baseline_text"))
            spec.baseline_program = doc["baseline_text"].get<std::string>();
        else
            spec.baseline_program = util::read_file(base / doc.at("baseline").get<std::string>());
        for (const auto& t : doc.at("tests"))
            spec.tests.push_back(
                {t.at("input").get<std::string>(), t.at("expected").get<std::string>()});
    } catch (const json::exception& e) {
        throw ManifestError("task spec " + path.string() + ": " + e.what());
    }
    if (spec.tests.size() < 2)
        throw InsufficientTests("task " + spec.task_id + " needs at least 2 tests");
    return spec;
}

namespace {

struct CandidateFile {
    std::string candidate_id;
    std::string code;
};

std::vector<CandidateFile> load_candidates(const std::filesystem::path& task_dir) {
    // No provenance record means no candidates were generated for this task;
    // the task still gets an all-zero evaluation.
    if (!std::filesystem::exists(task_dir / "provenance.json")) return {};
    json provenance;
    try {
        provenance = json::parse(util::read_file(task_dir / "provenance.json"));
    } catch (const json::parse_error& e) {
        throw ManifestError("provenance " + (task_dir / "provenance.json").string() + ": " +
                            e.what());
    }
    std::vector<CandidateFile> out;
    for (const auto& c : provenance.value("candidates", json::array())) {
        CandidateFile cf;
        cf.candidate_id = c.at("candidate_id").get<std::string>();
        cf.code = util::read_file(task_dir / c.at("file").get<std::string>());
        out.push_back(std::move(cf));
    }
    return out;
}

std::vector<TestCase> subset(const std::vector<TestCase>& tests, const std::vector<int>& indices) {
    std::vector<TestCase> out;
    out.reserve(indices.size());
    for (int i : indices) out.push_back(tests.at(i));
    return out;
}

}  // namespace

EvalReport cmd_evaluate(const PipelineConfig& config,
                        const std::vector<std::filesystem::path>& task_files,
                        const std::optional<std::filesystem::path>& compare) {
    if (config.runner_command.empty())
        throw ConfigError("evaluate needs a configured runner command");
    SubprocessRunner runner(config.runner_command);

    EvalReport report;
    report.budget = config.budget;
    report.improvement_threshold = config.improvement_threshold;

    for (const auto& file : task_files) {
        TaskEval eval;
        try {
            const TaskSpec spec = load_task_spec(file);
            eval.task_id = spec.task_id;
            const SplitResult split = split_tests(spec, config.split_seed);
            const auto public_tests = subset(spec.tests, split.public_indices);
            const auto private_tests = subset(spec.tests, split.private_indices);

            const MeasureResult baseline =
                measure_runtime(spec.baseline_program, spec.language, private_tests, runner,
                                config.repeats, config.limits);
            if (!baseline.passed)
                throw EvalError("baseline program fails its own private tests");
            eval.baseline_private_ms = baseline.mean_ms;

            const auto candidates = load_candidates(config.candidates_dir() / spec.task_id);
            for (const auto& candidate : candidates) {
                RunResult rr;
                rr.candidate_id = candidate.candidate_id;
                rr.repeats = config.repeats;
                const MeasureResult pub =
                    measure_runtime(candidate.code, spec.language, public_tests, runner,
                                    config.repeats, config.limits);
                rr.passed_public = pub.passed;
                rr.public_runtime_mean = pub.mean_ms;
                rr.timeout = pub.timed_out;
                if (pub.passed) {
                    const MeasureResult priv =
                        measure_runtime(candidate.code, spec.language, private_tests, runner,
                                        config.repeats, config.limits);
                    rr.passed_private = priv.passed;
                    rr.private_runtime_mean = priv.mean_ms;
                    rr.timeout = rr.timeout || priv.timed_out;
                }
                eval.results.push_back(std::move(rr));
            }
            eval.ranking = rank_candidates(eval.results);
        } catch (const MeasurementError& e) {
            eval.error = e.what();  // infrastructure failure; keep evaluating other tasks
            if (eval.task_id.empty()) eval.task_id = file.string();
        } catch (const EvalError& e) {
            eval.error = e.what();
            if (eval.task_id.empty()) eval.task_id = file.string();
        }
        report.tasks.push_back(std::move(eval));
    }
    finalize_report(report);

    if (compare) {
        const EvalReport other = load_report(config.resolve(*compare));
        std::vector<TaskEval> mine_ok, other_ok;
        for (const auto& t : report.tasks)
            if (!t.error) mine_ok.push_back(t);
        for (const auto& t : other.tasks)
            if (!t.error) other_ok.push_back(t);
        CompareBlock block;
        block.win_loss = win_loss(mine_ok, other_ok, report.budget);
        block.p_value_top1 =
            paired_bootstrap(success_vector(mine_ok, 1, report.improvement_threshold),
                             success_vector(other_ok, 1, other.improvement_threshold),
                             config.bootstrap_resamples, config.bootstrap_seed);
        block.p_value_topk =
            paired_bootstrap(success_vector(mine_ok, report.budget, report.improvement_threshold),
                             success_vector(other_ok, other.budget, other.improvement_threshold),
                             config.bootstrap_resamples, config.bootstrap_seed);
        report.compare = block;
    }

    save_report(report, config.report_path());
    return report;
}

std::string cmd_report(const std::filesystem::path& report_path,
                       const std::optional<std::filesystem::path>& compare,
                       const PipelineConfig& config) {
    EvalReport report = load_report(report_path);
    if (compare) {
        const EvalReport other = load_report(*compare);
        std::vector<TaskEval> mine_ok, other_ok;
        for (const auto& t : report.tasks)
            if (!t.error) mine_ok.push_back(t);
        for (const auto& t : other.tasks)
            if (!t.error) other_ok.push_back(t);
        CompareBlock block;
        block.win_loss = win_loss(mine_ok, other_ok, report.budget);
        block.p_value_top1 =
            paired_bootstrap(success_vector(mine_ok, 1, report.improvement_threshold),
                             success_vector(other_ok, 1, other.improvement_threshold),
                             config.bootstrap_resamples, config.bootstrap_seed);
        block.p_value_topk =
            paired_bootstrap(success_vector(mine_ok, report.budget, report.improvement_threshold),
                             success_vector(other_ok, other.budget, other.improvement_threshold),
                             config.bootstrap_resamples, config.bootstrap_seed);
        report.compare = block;
    }
    return format_report(report);
}

// ---------------- registry introspection ----------------

std::string registry_inspect(const std::filesystem::path& registry_dir,
                             const std::string& skill_id) {
    const SkillRegistry registry = load_registry(registry_dir);
    if (const OperatorSkill* op = registry.find_operator(skill_id))
        return render_operator_card(*op);
    if (const MetaSkill* meta = registry.find_meta(skill_id)) return render_meta_card(*meta);
    throw ConfigError("skill '" + skill_id + "' not found in " + registry_dir.string());
}

std::vector<UsageEvent> load_usage_runs(const std::filesystem::path& path) {
    std::vector<UsageEvent> events;
    if (std::filesystem::is_directory(path)) {
        // A candidates output directory: one provenance record per task folder.
        std::vector<std::filesystem::path> provenance_files;
        for (const auto& entry : std::filesystem::recursive_directory_iterator(path))
            if (entry.is_regular_file() && entry.path().filename() == "provenance.json")
                provenance_files.push_back(entry.path());
        std::sort(provenance_files.begin(), provenance_files.end());
        for (const auto& file : provenance_files) {
            json doc;
            try {
                doc = json::parse(util::read_file(file));
            } catch (const json::parse_error& e) {
                throw ManifestError("provenance " + file.string() + ": " + e.what());
            }
            for (const auto& c : doc.value("candidates", json::array()))
                events.push_back({c.at("candidate_id").get<std::string>(),
                                  c.value("skill_ids", std::vector<std::string>{})});
        }
        return events;
    }
    for (const auto& line : util::split_lines(util::read_file(path))) {
        if (util::trim(line).empty()) continue;
        try {
            json rec = json::parse(line);
            events.push_back({rec.at("candidate_id").get<std::string>(),
                              rec.value("skill_ids", std::vector<std::string>{})});
        } catch (const json::exception& e) {
            throw ManifestError("usage log " + path.string() + ": " + e.what());
        }
    }
    return events;
}

std::string format_usage_report(const UsageReport& report) {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(1);
    out << "candidate-skill pairs: " << report.total_pairs << "\n";
    out.precision(3);
    out << "usage entropy (nats): " << report.entropy << "\n";
    out << "effective skills (e^H): " << report.effective_skills << "\n";
    out.precision(1);
    out << "top-5 usage share: " << report.top5_share_pct << "%\n";
    out << "\nper-family usage share\n";
    for (const auto& [family, share] : report.family_share_pct)
        out << "  " << family << ": " << share << "%\n";
    out << "\nper-skill counts\n";
    for (const auto& [skill_id, count] : report.per_skill)
        out << "  " << skill_id << ": " << count << "\n";
    return out.str();
}

}  // namespace skillopt
