// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 skillopt contributors

#pragma once

#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "skillopt/errors.hpp"
#include "skillopt/gateway.hpp"
#include "skillopt/skill_library.hpp"

namespace skillopt::test {

/// Self-deleting temporary directory.
struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& prefix) {
        static std::mt19937_64 rng(std::random_device{}());
        path = std::filesystem::temp_directory_path() /
               (prefix + "-" + std::to_string(rng()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

/// Backend that answers from scripted rules: the first rule whose template_id
/// matches and whose needle occurs in the rendered prompt wins. A per-template
/// fallback queue serves rule-less flows in call order.
class ScriptedBackend : public Backend {
public:
    void add_rule(std::string template_id, std::string needle, std::string response) {
        rules_.push_back({std::move(template_id), std::move(needle), std::move(response)});
    }
    void push_response(std::string template_id, std::string response) {
        queues_[std::move(template_id)].push_back(std::move(response));
    }

    CompletionResponse complete(const PromptRequest& request) override {
        ++calls_;
        for (const auto& rule : rules_) {
            if (rule.template_id == request.template_id &&
                request.rendered_prompt.find(rule.needle) != std::string::npos)
                return {rule.response, std::nullopt, std::nullopt, id()};
        }
        auto it = queues_.find(request.template_id);
        if (it != queues_.end() && !it->second.empty()) {
            std::string response = it->second.front();
            it->second.erase(it->second.begin());
            return {std::move(response), std::nullopt, std::nullopt, id()};
        }
        throw BackendError("scripted backend has no response for template '" +
                               request.template_id + "'",
                           1, false);
    }
    std::string id() const override { return "scripted"; }
    int calls() const { return calls_; }

private:
    struct Rule {
        std::string template_id;
        std::string needle;
        std::string response;
    };
    std::vector<Rule> rules_;
    std::map<std::string, std::vector<std::string>> queues_;
    int calls_ = 0;
};

// ---- canned skill builders ----

inline OperatorSkill make_operator_skill(const std::string& id, const std::string& name,
                                         const std::string& description,
                                         const std::string& family = "Implementation & constant-factor") {
    OperatorSkill s;
    s.skill_id = id;
    s.language = "python";
    s.name = name;
    s.description = description;
    s.family = family;
    s.tags = {"tag-a", "tag-b"};
    s.triggers = {"hot loop", "large n"};
    s.when_to_use = "when the profile shows " + name;
    s.transformation_steps = "step one; step two";
    s.expected_complexity_effect = "O(n^2) -> O(n)";
    s.common_pitfalls = "off-by-one at boundaries";
    s.when_not_to_use = "tiny inputs";
    s.minimal_example = "before: loop / after: formula";
    return s;
}

inline MetaSkill make_meta_skill(const std::string& id, const std::string& name) {
    MetaSkill m;
    m.skill_id = id;
    m.language = "python";
    m.name = name;
    m.description = "controls " + name;
    m.overview = "oversees the pipeline step";
    m.core_loop = "observe; decide; act";
    m.routing_heuristics = "match triggers to bottlenecks";
    m.budgeting_control_logic = "spend slots round-robin";
    m.decision_checklist = "is the bottleneck confirmed; is the skill applicable";
    return m;
}

inline SkillRegistry make_registry(int n_operators, const std::string& run_id = "fx") {
    SkillRegistry registry;
    for (int i = 0; i < n_operators; ++i) {
        registry.operator_skills.push_back(make_operator_skill(
            run_id + "-op-" + std::to_string(i), "skill number " + std::to_string(i),
            "unique mechanism " + std::to_string(i),
            kDefaultFamilies[i % kDefaultFamilies.size()]));
    }
    registry.meta_skills.push_back(make_meta_skill(run_id + "-meta-1", "diagnosis"));
    registry.meta_skills.push_back(make_meta_skill(run_id + "-meta-2", "routing"));
    registry.meta_skills.push_back(make_meta_skill(run_id + "-meta-3", "budgeting"));
    registry.provenance = {run_id, "synthetic", 7, n_operators};
    return registry;
}

}  // namespace skillopt::test
