// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 skillopt contributors

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "skillopt/gateway.hpp"
#include "skillopt/trace_mining.hpp"

namespace skillopt {

/// A concrete slow->fast transformation mechanism, distilled from one cluster.
struct OperatorSkill {
    std::string skill_id;
    std::string type = "operator";
    std::string language;
    std::string name;
    std::string description;
    std::string family;
    std::vector<std::string> tags;
    std::vector<std::string> triggers;
    // body sections
    std::string when_to_use;
    std::string transformation_steps;
    std::string expected_complexity_effect;
    std::string common_pitfalls;
    std::string when_not_to_use;
    std::string minimal_example;

    bool operator==(const OperatorSkill&) const = default;
};

/// Procedural control knowledge: diagnosis, retrieval routing, or budgeting.
struct MetaSkill {
    std::string skill_id;
    std::string type = "meta";
    std::string language;
    std::string name;
    std::string description;
    // body sections
    std::string overview;
    std::string core_loop;
    std::string routing_heuristics;
    std::string budgeting_control_logic;
    std::string decision_checklist;

    bool operator==(const MetaSkill&) const = default;
};

struct RegistryProvenance {
    std::string run_id;
    std::string corpus;
    std::uint64_t seed = 0;
    int cluster_count = 0;

    bool operator==(const RegistryProvenance&) const = default;
};

struct SkillRegistry {
    std::vector<OperatorSkill> operator_skills;
    std::vector<MetaSkill> meta_skills;
    RegistryProvenance provenance;

    const OperatorSkill* find_operator(const std::string& skill_id) const;
    const MetaSkill* find_meta(const std::string& skill_id) const;

    bool operator==(const SkillRegistry&) const = default;
};

/// Reusable profile of one cluster's shared transformation behavior.
struct ClusterProfile {
    int cluster_index = 0;
    std::vector<std::string> member_pair_ids;
    std::string shared_mechanism_summary;
    std::vector<std::string> representative_triggers;
};

// The five default family names offered to the distillation prompt; free-form
// families are still accepted.
extern const std::vector<std::string> kDefaultFamilies;

struct ClusterMember {
    OptimizationTrace trace;
    Signature signature;
};

ClusterProfile summarize_cluster(int cluster_index, const std::vector<ClusterMember>& members,
                                 Gateway& gateway);

OperatorSkill distill_operator_skill(const ClusterProfile& profile, const std::string& language,
                                     const std::string& run_id, Gateway& gateway);

/// Renders the full card body, as written to disk and as pasted into prompts.
std::string render_operator_card(const OperatorSkill& skill);
std::string render_meta_card(const MetaSkill& skill);

/// Merge text used for similarity: name + description + when_to_use.
std::string merge_similarity_text(const OperatorSkill& skill);

/// Connected components of the >= threshold TF-IDF cosine relation over the
/// cards' similarity texts, ordered by first member; each component's indices
/// are ascending. With fewer than 2 cards, every card is its own component.
std::vector<std::vector<size_t>> merge_components(const std::vector<OperatorSkill>& skills,
                                                  double threshold);

/// Joins near-duplicate cards: components of the similarity relation are
/// merged through a conservative model prompt; singletons pass through. A
/// merge-prompt parse failure leaves the component unmerged with a warning.
/// Never grows the library.
std::vector<OperatorSkill> merge_similar(const std::vector<OperatorSkill>& skills,
                                         double threshold, Gateway& gateway,
                                         std::vector<std::string>* warnings = nullptr);

/// Exactly three controllers: diagnosis, retrieval routing, and plan
/// composition/budgeting, ids `<run_id>-meta-1..3` in that order.
std::vector<MetaSkill> induce_meta_skills(const std::vector<OperatorSkill>& operator_skills,
                                          const std::string& language, const std::string& run_id,
                                          Gateway& gateway);

/// One card file per skill plus an index; the on-disk registry is the portable
/// artifact consumed by external agents as well as by this toolkit.
void save_registry(const SkillRegistry& registry, const std::filesystem::path& dir);
SkillRegistry load_registry(const std::filesystem::path& dir);  // LoadError on any defect

// ---------------- usage analytics ----------------

/// One generated candidate and the skills attached to it. A skill used by
/// several plans of the same candidate still counts once per (candidate,
/// skill) pair.
struct UsageEvent {
    std::string candidate_id;
    std::vector<std::string> skill_ids;
};

struct UsageReport {
    std::map<std::string, int> per_skill;             // (candidate, skill) pair counts
    std::map<std::string, double> family_share_pct;   // sums to 100 when any usage exists
    double entropy = 0.0;                             // nats
    double effective_skills = 0.0;                    // exp(entropy), 0 when unused
    double top5_share_pct = 0.0;
    int total_pairs = 0;
};

/// Throws ConsistencyError when a run references a skill id absent from the
/// registry.
UsageReport usage_stats(const SkillRegistry& registry, const std::vector<UsageEvent>& runs);

}  // namespace skillopt
