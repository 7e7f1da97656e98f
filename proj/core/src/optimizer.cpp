// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 skillopt contributors

#include "skillopt/optimizer.hpp"

#include <algorithm>

#include "skillopt/errors.hpp"
#include "skillopt/util.hpp"

namespace skillopt {

namespace {

const MetaSkill& meta_by_ordinal(const SkillRegistry& registry, size_t ordinal,
                                 const char* role) {
    if (registry.meta_skills.size() <= ordinal)
        throw RetrievalError(std::string("registry has no ") + role + " meta card");
    return registry.meta_skills[ordinal];
}

std::string brief_as_text(const DiagnosisBrief& brief) {
    std::string out;
    out += "LikelyBottlenecks: " + util::join(brief.likely_bottlenecks, "; ") + "\n";
    out += "DominantOperations: " + util::join(brief.dominant_operations, "; ") + "\n";
    out += "InferredConstraints: " + util::join(brief.inferred_constraints, "; ") + "\n";
    out += "OptimizationScope: " + brief.optimization_scope + "\n";
    return out;
}

std::string skill_index_text(const SkillRegistry& registry) {
    std::string index;
    for (const auto& s : registry.operator_skills) {
        index += s.skill_id + " | " + s.name + " | " + s.description +
                 " | triggers: " + util::join(s.triggers, "; ") + "\n";
    }
    return index;
}

void warn(std::vector<std::string>* warnings, std::string message) {
    if (warnings) warnings->push_back(std::move(message));
}

}  // namespace

DiagnosisBrief diagnose(const OptimizationTask& task, const SkillRegistry& registry,
                        Gateway& gateway) {
    if (task.input_program.empty()) throw Error("task " + task.task_id + " has no input program");
    const MetaSkill& controller = meta_by_ordinal(registry, 0, "diagnosis");

    PromptRequest request;
    request.role_id = "diagnose";
    request.template_id = "diagnose";
    request.rendered_prompt = render_template("diagnose", {{"meta_card", render_meta_card(controller)},
                                                           {"task_id", task.task_id},
                                                           {"language", task.language},
                                                           {"statement", task.statement},
                                                           {"program", task.input_program}});
    const ParsedRecord record = complete_structured(gateway, request, "brief");

    DiagnosisBrief brief;
    brief.task_id = task.task_id;
    brief.likely_bottlenecks = record.list("LikelyBottlenecks");
    brief.dominant_operations = record.list("DominantOperations");
    brief.inferred_constraints = record.list("InferredConstraints");
    brief.optimization_scope = record.at("OptimizationScope");
    if (brief.likely_bottlenecks.empty())
        throw ParseError("LikelyBottlenecks parsed empty (task " + task.task_id + ")",
                         "LikelyBottlenecks");
    return brief;
}

namespace {

std::vector<SkillBundle> bundles_from_records(const std::vector<ParsedRecord>& records,
                                              const SkillRegistry& registry,
                                              std::vector<std::string>* warnings) {
    std::vector<SkillBundle> bundles;
    for (const auto& record : records) {
        SkillBundle bundle;
        bundle.bundle_index = static_cast<int>(bundles.size());
        bundle.rationale = record.get("Rationale");
        for (const auto& skill_id : record.list("SkillIds")) {
            if (!registry.find_operator(skill_id)) {
                warn(warnings, "bundle " + std::to_string(bundle.bundle_index) +
                                   " names unknown skill '" + skill_id + "', dropped");
                continue;
            }
            if (std::find(bundle.skill_ids.begin(), bundle.skill_ids.end(), skill_id) !=
                bundle.skill_ids.end()) {
                warn(warnings, "bundle " + std::to_string(bundle.bundle_index) +
                                   " repeats skill '" + skill_id + "', deduplicated");
                continue;
            }
            bundle.skill_ids.push_back(skill_id);
        }
        if (bundle.skill_ids.empty())
            throw RetrievalError("bundle " + std::to_string(bundle.bundle_index) +
                                 " has no resolvable skills");
        bundles.push_back(std::move(bundle));
    }
    return bundles;
}

}  // namespace

std::vector<SkillBundle> retrieve_skills(const DiagnosisBrief& brief,
                                         const SkillRegistry& registry, Gateway& gateway,
                                         std::vector<std::string>* warnings) {
    if (registry.operator_skills.empty())
        throw RetrievalError("registry has no operator skills to retrieve from");
    const MetaSkill& controller = meta_by_ordinal(registry, 1, "retrieval-routing");

    PromptRequest request;
    request.role_id = "retrieve";
    request.template_id = "retrieve";
    request.rendered_prompt = render_template(
        "retrieve",
        {{"meta_card", render_meta_card(controller)},
         {"task_id", brief.task_id},
         {"likely_bottlenecks", util::join(brief.likely_bottlenecks, "; ")},
         {"dominant_operations", util::join(brief.dominant_operations, "; ")},
         {"inferred_constraints", util::join(brief.inferred_constraints, "; ")},
         {"optimization_scope", brief.optimization_scope},
         {"skill_index", skill_index_text(registry)}});

    auto records = parse_structured_list(gateway.complete(request), "bundle");
    if (records.size() != 3) {
        // One corrective re-prompt, then the cardinality contract is enforced.
        PromptRequest retry = correction_request(
            request, "expected exactly 3 bundle blocks, got " + std::to_string(records.size()));
        try {
            records = parse_structured_list(gateway.complete(retry), "bundle");
        } catch (const TranscriptMiss&) {
            throw RetrievalError("expected 3 skill bundles, got " +
                                 std::to_string(records.size()));
        }
        if (records.size() != 3)
            throw RetrievalError("expected 3 skill bundles, got " +
                                 std::to_string(records.size()));
    }
    return bundles_from_records(records, registry, warnings);
}

std::vector<OptimizationPlan> compose_plans(const DiagnosisBrief& brief, const SkillBundle& bundle,
                                            const std::vector<MetaSkill>& meta_skills,
                                            Gateway& gateway,
                                            std::vector<std::string>* warnings) {
    if (bundle.skill_ids.empty()) throw PlanError("bundle has no skills");
    if (meta_skills.size() < 3) throw PlanError("registry has no budgeting meta card");

    std::string route = "Route rationale: " + bundle.rationale + "\nSkills: [" +
                        util::join(bundle.skill_ids, "]; [") + "]\n";

    PromptRequest request;
    request.role_id = "compose_plans";
    request.template_id = "compose_plans";
    request.rendered_prompt = render_template(
        "compose_plans", {{"meta_card", render_meta_card(meta_skills[2])},
                          {"task_id", brief.task_id},
                          {"bundle_index", std::to_string(bundle.bundle_index)},
                          {"likely_bottlenecks", util::join(brief.likely_bottlenecks, "; ")},
                          {"optimization_scope", brief.optimization_scope},
                          {"bundle_cards", route}});

    auto records = parse_structured_list(gateway.complete(request), "plan");
    if (records.size() < 2) {
        PromptRequest retry = correction_request(
            request, "expected 2 to 3 plan blocks, got " + std::to_string(records.size()));
        try {
            records = parse_structured_list(gateway.complete(retry), "plan");
        } catch (const TranscriptMiss&) {
            throw PlanError("expected 2 to 3 plans for bundle " +
                            std::to_string(bundle.bundle_index) + ", got " +
                            std::to_string(records.size()));
        }
        if (records.size() < 2)
            throw PlanError("expected 2 to 3 plans for bundle " +
                            std::to_string(bundle.bundle_index) + ", got " +
                            std::to_string(records.size()));
    }
    if (records.size() > 3) {
        warn(warnings, "bundle " + std::to_string(bundle.bundle_index) + " produced " +
                           std::to_string(records.size()) + " plans, keeping the first 3");
        records.resize(3);
    }

    std::vector<OptimizationPlan> plans;
    for (const auto& record : records) {
        OptimizationPlan plan;
        plan.bundle_index = bundle.bundle_index;
        plan.plan_id = brief.task_id + "-b" + std::to_string(bundle.bundle_index) + "-p" +
                       std::to_string(plans.size());
        plan.strategy = record.at("Strategy");
        plan.anticipated_improvement = record.get("AnticipatedImprovement");
        plan.risks = record.get("Risks");
        plan.step_sequence = record.list("Steps");
        if (plan.step_sequence.empty())
            throw ParseError("plan " + plan.plan_id + " has no steps", "Steps");

        // Step annotations may cite skills; citations outside the bundle are
        // flagged but the plan is kept.
        for (const auto& step : plan.step_sequence) {
            size_t pos = 0;
            while ((pos = step.find('[', pos)) != std::string::npos) {
                const size_t end = step.find(']', pos);
                if (end == std::string::npos) break;
                const std::string cited = step.substr(pos + 1, end - pos - 1);
                if (!cited.empty() &&
                    std::find(bundle.skill_ids.begin(), bundle.skill_ids.end(), cited) ==
                        bundle.skill_ids.end())
                    warn(warnings, "plan " + plan.plan_id + " cites skill '" + cited +
                                       "' outside its bundle");
                pos = end + 1;
            }
        }
        plans.push_back(std::move(plan));
    }
    return plans;
}

std::vector<ScheduleSlot> allocate_budget(const std::vector<std::vector<OptimizationPlan>>& plans,
                                          int budget) {
    size_t total_plans = 0;
    size_t max_plans = 0;
    for (const auto& bundle_plans : plans) {
        total_plans += bundle_plans.size();
        max_plans = std::max(max_plans, bundle_plans.size());
    }
    if (total_plans == 0) throw PlanError("no plans to schedule");

    std::vector<ScheduleSlot> schedule;
    int slot = 0;
    while (slot < budget) {
        // One full cycle enumerates every plan once: pass p takes plan p of
        // each bundle, skipping bundles that ran out.
        for (size_t pass = 0; pass < max_plans && slot < budget; ++pass) {
            for (size_t b = 0; b < plans.size() && slot < budget; ++b) {
                if (pass >= plans[b].size()) continue;
                schedule.push_back(
                    {slot, static_cast<int>(b), static_cast<int>(pass)});
                ++slot;
            }
        }
    }
    return schedule;
}

std::vector<Candidate> generate_candidates(const OptimizationTask& task,
                                           const DiagnosisBrief& brief,
                                           const std::vector<SkillBundle>& bundles,
                                           const std::vector<std::vector<OptimizationPlan>>& plans,
                                           const std::vector<ScheduleSlot>& schedule,
                                           const SkillRegistry& registry, Gateway& gateway,
                                           const OptimizerOptions& options,
                                           std::vector<std::string>* warnings) {
    if (schedule.empty()) throw PlanError("empty generation schedule");

    std::vector<Candidate> candidates;
    for (const auto& slot : schedule) {
        const SkillBundle& bundle = bundles.at(slot.bundle_index);
        const OptimizationPlan& plan = plans.at(slot.bundle_index).at(slot.plan_index);

        std::string cards;
        for (const auto& skill_id : bundle.skill_ids) {
            const OperatorSkill* skill = registry.find_operator(skill_id);
            if (skill) cards += render_operator_card(*skill) + "\n";
        }

        PromptRequest request;
        request.role_id = "generate";
        request.template_id = "generate";
        request.temperature = options.generation_temperature;
        // The slot seed makes repeated generations of the same plan distinct
        // fingerprints, so transcripts can replay each slot individually.
        request.rendered_prompt = render_template(
            "generate", {{"task_id", task.task_id},
                         {"slot_seed", std::to_string(slot.slot_index)},
                         {"language", task.language},
                         {"statement", task.statement},
                         {"program", task.input_program},
                         {"brief", brief_as_text(brief)},
                         {"strategy", plan.strategy},
                         {"steps", util::join(plan.step_sequence, "; ")},
                         {"cards", cards}});

        const CompletionResponse response = gateway.complete(request);
        auto code = extract_fenced_block(response.text);
        if (!code || util::trim(*code).empty()) {
            warn(warnings, "slot " + std::to_string(slot.slot_index) + " (plan " + plan.plan_id +
                               ") returned no code block, skipped");
            continue;
        }

        Candidate candidate;
        candidate.candidate_id = task.task_id + "-c" + std::to_string(slot.slot_index);
        candidate.task_id = task.task_id;
        candidate.plan_id = plan.plan_id;
        candidate.code = *code;
        candidate.skill_ids = bundle.skill_ids;
        candidates.push_back(std::move(candidate));
    }
    return candidates;
}

StageTwoResult optimize_task(const OptimizationTask& task, const SkillRegistry& registry,
                             Gateway& gateway, const OptimizerOptions& options) {
    StageTwoResult result;
    result.brief = diagnose(task, registry, gateway);
    result.bundles = retrieve_skills(result.brief, registry, gateway, &result.warnings);
    for (const auto& bundle : result.bundles)
        result.plans.push_back(compose_plans(result.brief, bundle, registry.meta_skills, gateway,
                                             &result.warnings));
    result.schedule = allocate_budget(result.plans, options.budget);
    result.candidates = generate_candidates(task, result.brief, result.bundles, result.plans,
                                            result.schedule, registry, gateway, options,
                                            &result.warnings);
    return result;
}

}  // namespace skillopt
