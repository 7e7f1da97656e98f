// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 skillopt contributors

#include "skillopt/corpus.hpp"

#include <unordered_set>

#include <json.hpp>

#include "skillopt/errors.hpp"
#include "skillopt/util.hpp"

namespace skillopt {

using nlohmann::json;

double compute_speedup_ratio(const SolutionPair& pair) {
    if (pair.cost_slow <= 0.0 || pair.cost_fast <= 0.0)
        throw InvalidPair(pair.pair_id, "costs must be positive");
    return pair.cost_slow / pair.cost_fast;
}

MiningCorpus filter_pairs(const MiningCorpus& corpus, double min_ratio) {
    MiningCorpus out;
    out.language = corpus.language;
    out.provenance = corpus.provenance;
    for (const auto& pair : corpus.pairs) {
        if (compute_speedup_ratio(pair) >= min_ratio) out.pairs.push_back(pair);
    }
    return out;
}

std::set<std::string> check_overlap(const MiningCorpus& corpus,
                                    const std::set<std::string>& benchmark_task_ids) {
    std::set<std::string> overlap;
    for (const auto& pair : corpus.pairs) {
        if (benchmark_task_ids.count(pair.task_id)) overlap.insert(pair.task_id);
    }
    return overlap;
}

namespace {

std::string read_relative(const std::filesystem::path& base, const std::string& rel) {
    return util::read_file(base / rel);
}

}  // namespace

MiningCorpus load_corpus(const std::filesystem::path& manifest_path) {
    const std::string raw = util::read_file(manifest_path);
    json doc;
    try {
        doc = json::parse(raw);
    } catch (const json::parse_error& e) {
        throw ManifestError("manifest is not valid JSON: " + std::string(e.what()));
    }
    if (!doc.is_object() || !doc.contains("pairs") || !doc["pairs"].is_array())
        throw ManifestError("manifest must be an object with a 'pairs' array");

    MiningCorpus corpus;
    corpus.language = doc.value("language", "");
    corpus.provenance = doc.value("provenance", manifest_path.filename().string());
    if (corpus.language.empty()) throw ManifestError("manifest missing 'language'");

    const auto base = manifest_path.has_parent_path() ? manifest_path.parent_path()
                                                      : std::filesystem::path(".");
    std::unordered_set<std::string> seen_ids;
    for (const auto& rec : doc["pairs"]) {
        SolutionPair pair;
        try {
            pair.pair_id = rec.at("pair_id").get<std::string>();
            pair.task_id = rec.at("task_id").get<std::string>();
            pair.language = rec.value("language", corpus.language);
            pair.cost_slow = rec.at("cost_slow").get<double>();
            pair.cost_fast = rec.at("cost_fast").get<double>();
            pair.slow_code = read_relative(base, rec.at("slow").get<std::string>());
            pair.fast_code = read_relative(base, rec.at("fast").get<std::string>());
            if (rec.contains("context"))
                pair.task_context = read_relative(base, rec["context"].get<std::string>());
        } catch (const json::exception& e) {
            throw ManifestError("malformed pair record: " + std::string(e.what()));
        }
        if (!seen_ids.insert(pair.pair_id).second) throw DuplicateId(pair.pair_id);
        if (pair.cost_slow <= 0.0 || pair.cost_fast <= 0.0)
            throw InvalidPair(pair.pair_id, "costs must be positive");
        if (pair.language != corpus.language)
            throw InvalidPair(pair.pair_id, "language '" + pair.language +
                                                "' does not match corpus language '" +
                                                corpus.language + "'");
        corpus.pairs.push_back(std::move(pair));
    }
    return corpus;
}

}  // namespace skillopt
