// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 skillopt contributors

#pragma once

#include <string>
#include <vector>

#include "skillopt/gateway.hpp"
#include "skillopt/skill_library.hpp"

namespace skillopt {

struct OptimizationTask {
    std::string task_id;
    std::string statement;      // task-level context
    std::string input_program;  // the program to optimize; never executed here
    std::string language;
};

struct DiagnosisBrief {
    std::string task_id;
    std::vector<std::string> likely_bottlenecks;
    std::vector<std::string> dominant_operations;
    std::vector<std::string> inferred_constraints;
    std::string optimization_scope;
};

/// One plausible optimization route: a set of operator skills applied together.
struct SkillBundle {
    int bundle_index = 0;  // 0..2
    std::vector<std::string> skill_ids;
    std::string rationale;
};

struct OptimizationPlan {
    std::string plan_id;
    int bundle_index = 0;
    std::string strategy;
    std::string anticipated_improvement;
    std::string risks;
    std::vector<std::string> step_sequence;
};

struct Candidate {
    std::string candidate_id;
    std::string task_id;
    std::string plan_id;
    std::string code;
    std::vector<std::string> skill_ids;  // skills whose cards conditioned the generation
};

struct OptimizerOptions {
    int budget = 8;
    double generation_temperature = 0.8;  // diversity is the point of multi-plan generation
};

DiagnosisBrief diagnose(const OptimizationTask& task, const SkillRegistry& registry,
                        Gateway& gateway);

/// Exactly 3 bundles. Skill ids are validated against the registry; unknown
/// ids are dropped with a warning, and a bundle emptied by dropping (or a
/// persistent wrong bundle count after one corrective re-prompt) is a
/// RetrievalError.
std::vector<SkillBundle> retrieve_skills(const DiagnosisBrief& brief,
                                         const SkillRegistry& registry, Gateway& gateway,
                                         std::vector<std::string>* warnings = nullptr);

/// 2 to 3 plans per bundle. Steps citing a skill outside the bundle are
/// flagged as warnings but the plan is kept.
std::vector<OptimizationPlan> compose_plans(const DiagnosisBrief& brief, const SkillBundle& bundle,
                                            const std::vector<MetaSkill>& meta_skills,
                                            Gateway& gateway,
                                            std::vector<std::string>* warnings = nullptr);

struct ScheduleSlot {
    int slot_index = 0;
    int bundle_index = 0;
    int plan_index = 0;  // within the bundle
};

/// Round-robin across bundles in bundle order, within bundles in plan order,
/// truncated at `budget`; when there are fewer plans than budget the schedule
/// cycles over the plans again.
std::vector<ScheduleSlot> allocate_budget(const std::vector<std::vector<OptimizationPlan>>& plans,
                                          int budget = 8);

/// One candidate per schedule slot, in slot order. Generation prompts carry
/// the task, brief, plan, and the full card bodies of the bundle's skills; a
/// response without a code block skips that slot with a warning. Nothing is
/// ever executed here.
std::vector<Candidate> generate_candidates(const OptimizationTask& task,
                                           const DiagnosisBrief& brief,
                                           const std::vector<SkillBundle>& bundles,
                                           const std::vector<std::vector<OptimizationPlan>>& plans,
                                           const std::vector<ScheduleSlot>& schedule,
                                           const SkillRegistry& registry, Gateway& gateway,
                                           const OptimizerOptions& options = {},
                                           std::vector<std::string>* warnings = nullptr);

struct StageTwoResult {
    DiagnosisBrief brief;
    std::vector<SkillBundle> bundles;
    std::vector<std::vector<OptimizationPlan>> plans;  // indexed by bundle
    std::vector<ScheduleSlot> schedule;
    std::vector<Candidate> candidates;
    std::vector<std::string> warnings;
};

/// The whole diagnose -> retrieve -> compose -> generate chain for one task.
StageTwoResult optimize_task(const OptimizationTask& task, const SkillRegistry& registry,
                             Gateway& gateway, const OptimizerOptions& options = {});

}  // namespace skillopt
