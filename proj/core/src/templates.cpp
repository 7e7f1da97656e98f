// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 skillopt contributors

#include <map>
#include <string>

#include "skillopt/errors.hpp"
#include "skillopt/gateway.hpp"

namespace skillopt {

namespace {

// Every pipeline prompt instructs the model to answer with fenced,
// field-labeled blocks; parse_structured keys on the labels, not on position.
const std::map<std::string, std::string>& template_table() {
    static const std::map<std::string, std::string> table = {

        {"trace_extract", R"(You are auditing two solutions of the same programming task: a slow one and a fast one.

PairId: {pair_id}
TaskId: {task_id}
Language: {language}

Task context:
{task_context}

Slow solution:
{slow_code}

Fast solution:
{fast_code}

Explain how the fast solution improves on the slow one. Reply with exactly one fenced block:

```record
ProblemBrief: <task context and inferred constraints>
SlowAudit: <dominant operations and likely bottlenecks of the slow solution>
FastAudit: <core optimization idea of the fast solution>
DeltaSummary: <the transformation bridge from slow to fast>
```
)"},

        {"signature_abstract", R"(Abstract the following optimization trace into a compact signature describing the transformation mechanism, independent of this particular program.

PairId: {pair_id}

ProblemBrief: {problem_brief}
SlowAudit: {slow_audit}
FastAudit: {fast_audit}
DeltaSummary: {delta_summary}

Reply with exactly one fenced block:

```record
OptimizationType: <short category of the transformation>
ComplexityShift: <e.g. O(n^2) -> O(n)>
Triggers: <semicolon-separated applicability conditions>
BottleneckCategory: <dominant cost being removed>
ProblemCharacteristics: <semicolon-separated task traits>
```
)"},

        {"cluster_summarize", R"(The optimization traces below were grouped together because they express the same underlying transformation mechanism. Summarize that shared mechanism as a reusable profile.

ClusterIndex: {cluster_index}

Members:
{members}

Reply with exactly one fenced block:

```record
SharedMechanism: <what these transformations have in common, as a reusable mechanism>
RepresentativeTriggers: <semicolon-separated conditions under which the mechanism applies>
```
)"},

        {"skill_distill", R"(Distill the cluster profile below into one reusable optimization skill card. Write for an engineer who has never seen the original programs.

ClusterIndex: {cluster_index}
Language: {language}
Members: {member_count} mined pairs

SharedMechanism: {shared_mechanism}
RepresentativeTriggers: {representative_triggers}

Pick the Family from this vocabulary when one fits, otherwise name a better one:
{family_vocabulary}

Reply with exactly one fenced block:

```card
Name: <imperative skill name>
Description: <one-sentence summary>
Family: <family name>
Tags: <semicolon-separated tags>
Triggers: <semicolon-separated applicability signals>
WhenToUse: <conditions that make the skill applicable>
TransformationSteps: <semicolon-separated concrete rewrite steps>
ExpectedComplexityEffect: <asymptotic or constant-factor effect>
CommonPitfalls: <what typically goes wrong>
WhenNotToUse: <conditions under which the skill backfires>
MinimalExample: <tiny before/after sketch>
```
)"},

        {"skill_merge", R"(The skill cards below describe nearly the same optimization mechanism. Merge them conservatively into a single card that loses none of their applicability conditions or pitfalls.

Cards to merge:
{cards}

Reply with exactly one fenced block in the same card format:

```card
Name: <merged name>
Description: <one-sentence summary>
Family: <family name>
Tags: <semicolon-separated tags>
Triggers: <semicolon-separated applicability signals>
WhenToUse: <merged applicability conditions>
TransformationSteps: <semicolon-separated steps>
ExpectedComplexityEffect: <effect>
CommonPitfalls: <merged pitfalls>
WhenNotToUse: <merged exclusions>
MinimalExample: <tiny before/after sketch>
```
)"},

        {"meta_induce", R"(You are building a procedural controller card that governs how an optimization agent uses a library of operator skills.

Controller: {controller_role}
Purpose: {controller_purpose}

Operator skill library:
{skill_index}

Reply with exactly one fenced block:

```card
Name: <controller name>
Description: <one-sentence summary>
Overview: <what this controller is responsible for>
CoreLoop: <the repeatable procedure it runs>
RoutingHeuristics: <how it maps observations to operator skills>
BudgetingControlLogic: <how it spends a limited candidate budget>
DecisionChecklist: <semicolon-separated questions to answer before acting>
```
)"},

        {"diagnose", R"({meta_card}

Diagnose the optimization task below without executing anything. Infer likely bottlenecks from the code and the statement alone.

TaskId: {task_id}
Language: {language}

Problem statement:
{statement}

Program to optimize:
{program}

Reply with exactly one fenced block:

```record
LikelyBottlenecks: <semicolon-separated bottleneck hypotheses>
DominantOperations: <semicolon-separated operations that dominate cost>
InferredConstraints: <semicolon-separated input-size or structural constraints>
OptimizationScope: <how far-reaching a rewrite is warranted>
```
)"},

        {"retrieve", R"({meta_card}

TaskId: {task_id}

Diagnosis brief:
LikelyBottlenecks: {likely_bottlenecks}
DominantOperations: {dominant_operations}
InferredConstraints: {inferred_constraints}
OptimizationScope: {optimization_scope}

Operator skill index:
{skill_index}

Select 3 alternative optimization routes. Each route is a bundle of operator skills from the index that would be applied together. Routes should differ meaningfully; an inefficient program usually admits several optimization directions. Reply with exactly 3 fenced blocks:

```bundle
SkillIds: <semicolon-separated skill ids from the index>
Rationale: <why this route fits the diagnosis>
```
)"},

        {"compose_plans", R"({meta_card}

TaskId: {task_id}
BundleIndex: {bundle_index}

Diagnosis brief:
LikelyBottlenecks: {likely_bottlenecks}
OptimizationScope: {optimization_scope}

Skills in this bundle:
{bundle_cards}

Compose the bundle into 2 to 3 alternative optimization plans. Cite skill ids in square brackets inside the steps. Reply with one fenced block per plan:

```plan
Strategy: <coherent transformation strategy>
AnticipatedImprovement: <expected efficiency effect>
Risks: <main risks to manage while rewriting>
Steps: <semicolon-separated ordered steps, citing [skill-id] where applied>
```
)"},

        {"generate", R"(Rewrite the program below following the optimization plan, preserving the program's interface and intended behavior exactly. Do not run anything; reason from the plan and the skill cards.

TaskId: {task_id}
SlotSeed: {slot_seed}
Language: {language}

Problem statement:
{statement}

Program to optimize:
{program}

Diagnosis brief:
{brief}

Plan:
Strategy: {strategy}
Steps: {steps}

Operator skills (full cards):
{cards}

Reply with exactly one fenced block containing only the complete rewritten program.
)"},
    };
    return table;
}

}  // namespace

bool has_template(const std::string& template_id) {
    return template_table().count(template_id) > 0;
}

std::string render_text(const std::string& template_text,
                        const std::map<std::string, std::string>& bindings) {
    std::string out;
    out.reserve(template_text.size());
    for (size_t i = 0; i < template_text.size(); ++i) {
        if (template_text[i] != '{') {
            out.push_back(template_text[i]);
            continue;
        }
        size_t close = template_text.find('}', i + 1);
        if (close == std::string::npos) throw TemplateError("unterminated placeholder");
        const std::string name = template_text.substr(i + 1, close - i - 1);
        auto binding = bindings.find(name);
        if (binding == bindings.end())
            throw TemplateError("unbound placeholder '" + name + "'");
        out += binding->second;
        i = close;
    }
    return out;
}

std::string render_template(const std::string& template_id,
                            const std::map<std::string, std::string>& bindings) {
    const auto& table = template_table();
    auto it = table.find(template_id);
    if (it == table.end()) throw TemplateError("unknown template '" + template_id + "'");
    return render_text(it->second, bindings);
}

}  // namespace skillopt
