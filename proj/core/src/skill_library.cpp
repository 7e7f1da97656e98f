// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 skillopt contributors

#include "skillopt/skill_library.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "skillopt/clustering.hpp"
#include "skillopt/errors.hpp"
#include "skillopt/util.hpp"

namespace skillopt {

using nlohmann::json;

const std::vector<std::string> kDefaultFamilies = {
    "Implementation & constant-factor",
    "Algebraic / closed-form reformulation",
    "DP / state compression",
    "Combinatorics & number theory",
    "Graph / data structure / set operations",
};

const OperatorSkill* SkillRegistry::find_operator(const std::string& skill_id) const {
    for (const auto& s : operator_skills)
        if (s.skill_id == skill_id) return &s;
    return nullptr;
}

const MetaSkill* SkillRegistry::find_meta(const std::string& skill_id) const {
    for (const auto& s : meta_skills)
        if (s.skill_id == skill_id) return &s;
    return nullptr;
}

// ---------------- distillation ----------------

ClusterProfile summarize_cluster(int cluster_index, const std::vector<ClusterMember>& members,
                                 Gateway& gateway) {
    if (members.empty())
        throw InsufficientData("cluster " + std::to_string(cluster_index) + " is empty");

    std::string rendered;
    for (const auto& m : members) {
        rendered += "PairId: " + m.trace.pair_id + "\n";
        rendered += "OptimizationType: " + m.signature.optimization_type + "\n";
        rendered += "BottleneckCategory: " + m.signature.bottleneck_category + "\n";
        rendered += "Triggers: " + util::join(m.signature.triggers, "; ") + "\n";
        rendered += "DeltaSummary: " + m.trace.delta_summary + "\n\n";
    }

    PromptRequest request;
    request.role_id = "cluster_summarize";
    request.template_id = "cluster_summarize";
    request.rendered_prompt = render_template(
        "cluster_summarize",
        {{"cluster_index", std::to_string(cluster_index)}, {"members", rendered}});

    ParsedRecord record;
    try {
        record = complete_structured(gateway, request, "profile");
    } catch (const ParseError& e) {
        throw ParseError(std::string(e.what()) + " (cluster " + std::to_string(cluster_index) + ")",
                         e.field);
    }

    ClusterProfile profile;
    profile.cluster_index = cluster_index;
    for (const auto& m : members) profile.member_pair_ids.push_back(m.trace.pair_id);
    profile.shared_mechanism_summary = record.at("SharedMechanism");
    profile.representative_triggers = record.list("RepresentativeTriggers");
    return profile;
}

namespace {

OperatorSkill operator_skill_from_record(const ParsedRecord& record, std::string skill_id,
                                         std::string language) {
    OperatorSkill skill;
    skill.skill_id = std::move(skill_id);
    skill.language = std::move(language);
    skill.name = record.at("Name");
    skill.description = record.at("Description");
    skill.family = record.at("Family");
    skill.tags = record.list("Tags");
    skill.triggers = record.list("Triggers");
    skill.when_to_use = record.at("WhenToUse");
    skill.transformation_steps = record.at("TransformationSteps");
    skill.expected_complexity_effect = record.at("ExpectedComplexityEffect");
    skill.common_pitfalls = record.at("CommonPitfalls");
    skill.when_not_to_use = record.at("WhenNotToUse");
    skill.minimal_example = record.at("MinimalExample");
    return skill;
}

}  // namespace

OperatorSkill distill_operator_skill(const ClusterProfile& profile, const std::string& language,
                                     const std::string& run_id, Gateway& gateway) {
    PromptRequest request;
    request.role_id = "skill_distill";
    request.template_id = "skill_distill";
    request.rendered_prompt = render_template(
        "skill_distill",
        {{"cluster_index", std::to_string(profile.cluster_index)},
         {"language", language},
         {"member_count", std::to_string(profile.member_pair_ids.size())},
         {"shared_mechanism", profile.shared_mechanism_summary},
         {"representative_triggers", util::join(profile.representative_triggers, "; ")},
         {"family_vocabulary", util::join(kDefaultFamilies, "; ")}});

    ParsedRecord record;
    try {
        record = complete_structured(gateway, request, "operator_card");
    } catch (const ParseError& e) {
        throw ParseError(std::string(e.what()) + " (cluster " +
                             std::to_string(profile.cluster_index) + ")",
                         e.field);
    }
    return operator_skill_from_record(record,
                                      run_id + "-op-" + std::to_string(profile.cluster_index),
                                      language);
}

// ---------------- card rendering ----------------

namespace {

constexpr const char* kOperatorSections[][2] = {
    {"When to use", "when_to_use"},
    {"Transformation steps", "transformation_steps"},
    {"Expected complexity effect", "expected_complexity_effect"},
    {"Common pitfalls", "common_pitfalls"},
    {"When not to use", "when_not_to_use"},
    {"Minimal example", "minimal_example"},
};

constexpr const char* kMetaSections[][2] = {
    {"Overview", "overview"},
    {"Core loop", "core_loop"},
    {"Routing heuristics", "routing_heuristics"},
    {"Budgeting / control logic", "budgeting_control_logic"},
    {"Decision checklist", "decision_checklist"},
};

std::string& operator_section(OperatorSkill& s, const std::string& key) {
    if (key == "when_to_use") return s.when_to_use;
    if (key == "transformation_steps") return s.transformation_steps;
    if (key == "expected_complexity_effect") return s.expected_complexity_effect;
    if (key == "common_pitfalls") return s.common_pitfalls;
    if (key == "when_not_to_use") return s.when_not_to_use;
    return s.minimal_example;
}

std::string& meta_section(MetaSkill& s, const std::string& key) {
    if (key == "overview") return s.overview;
    if (key == "core_loop") return s.core_loop;
    if (key == "routing_heuristics") return s.routing_heuristics;
    if (key == "budgeting_control_logic") return s.budgeting_control_logic;
    return s.decision_checklist;
}

const std::string& operator_section(const OperatorSkill& s, const std::string& key) {
    return operator_section(const_cast<OperatorSkill&>(s), key);
}

const std::string& meta_section(const MetaSkill& s, const std::string& key) {
    return meta_section(const_cast<MetaSkill&>(s), key);
}

}  // namespace

std::string render_operator_card(const OperatorSkill& skill) {
    std::string out = "---\n";
    out += "skill_id: " + skill.skill_id + "\n";
    out += "type: operator\n";
    out += "language: " + skill.language + "\n";
    out += "name: " + skill.name + "\n";
    out += "description: " + skill.description + "\n";
    out += "family: " + skill.family + "\n";
    out += "tags: " + util::join(skill.tags, "; ") + "\n";
    out += "triggers: " + util::join(skill.triggers, "; ") + "\n";
    out += "---\n";
    for (const auto& [heading, key] : kOperatorSections)
        out += "\n## " + std::string(heading) + "\n" + operator_section(skill, key) + "\n";
    return out;
}

std::string render_meta_card(const MetaSkill& skill) {
    std::string out = "---\n";
    out += "skill_id: " + skill.skill_id + "\n";
    out += "type: meta\n";
    out += "language: " + skill.language + "\n";
    out += "name: " + skill.name + "\n";
    out += "description: " + skill.description + "\n";
    out += "---\n";
    for (const auto& [heading, key] : kMetaSections)
        out += "\n## " + std::string(heading) + "\n" + meta_section(skill, key) + "\n";
    return out;
}

// ---------------- merging ----------------

std::string merge_similarity_text(const OperatorSkill& skill) {
    return skill.name + " " + skill.description + " " + skill.when_to_use;
}

namespace {

struct UnionFind {
    std::vector<size_t> parent;
    explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    size_t find(size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(size_t a, size_t b) { parent[find(a)] = find(b); }
};

}  // namespace

std::vector<std::vector<size_t>> merge_components(const std::vector<OperatorSkill>& skills,
                                                  double threshold) {
    const size_t n = skills.size();
    std::vector<std::vector<size_t>> components;
    if (n < 2) {
        for (size_t i = 0; i < n; ++i) components.push_back({i});
        return components;
    }

    std::vector<std::string> texts;
    texts.reserve(n);
    for (const auto& s : skills) texts.push_back(merge_similarity_text(s));
    const auto model = TfIdfModel::fit(texts);
    std::vector<SparseVec> rows;
    rows.reserve(n);
    for (const auto& t : texts) rows.push_back(model.transform(t));

    UnionFind uf(n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            if (rows[i].dot(rows[j]) >= threshold) uf.unite(i, j);  // rows are unit vectors

    std::map<size_t, size_t> root_to_component;
    for (size_t i = 0; i < n; ++i) {
        const size_t root = uf.find(i);
        auto [it, inserted] = root_to_component.emplace(root, components.size());
        if (inserted) components.emplace_back();
        components[it->second].push_back(i);
    }
    return components;
}

std::vector<OperatorSkill> merge_similar(const std::vector<OperatorSkill>& skills,
                                         double threshold, Gateway& gateway,
                                         std::vector<std::string>* warnings) {
    std::vector<OperatorSkill> out;
    for (const auto& component : merge_components(skills, threshold)) {
        if (component.size() == 1) {
            out.push_back(skills[component.front()]);
            continue;
        }
        std::string cards;
        for (size_t idx : component) cards += render_operator_card(skills[idx]) + "\n";

        PromptRequest request;
        request.role_id = "skill_merge";
        request.template_id = "skill_merge";
        request.rendered_prompt = render_template("skill_merge", {{"cards", cards}});
        try {
            const ParsedRecord record = complete_structured(gateway, request, "operator_card");
            const OperatorSkill& first = skills[component.front()];
            out.push_back(operator_skill_from_record(record, first.skill_id, first.language));
        } catch (const ParseError& e) {
            if (warnings)
                warnings->push_back("merge of " + std::to_string(component.size()) +
                                    " cards failed to parse, keeping them unmerged: " + e.what());
            for (size_t idx : component) out.push_back(skills[idx]);
        }
    }
    return out;
}

// ---------------- meta skills ----------------

std::vector<MetaSkill> induce_meta_skills(const std::vector<OperatorSkill>& operator_skills,
                                          const std::string& language, const std::string& run_id,
                                          Gateway& gateway) {
    if (operator_skills.empty())
        throw InsufficientData("cannot induce meta skills from an empty operator library");

    std::string index;
    for (const auto& s : operator_skills) {
        index += s.skill_id + " | " + s.name + " | " + s.description +
                 " | triggers: " + util::join(s.triggers, "; ") + "\n";
    }

    struct Controller {
        const char* role;
        const char* purpose;
    };
    const Controller controllers[3] = {
        {"diagnosis controller",
         "decide what to look at in an unseen program and produce a structured optimization "
         "brief without executing anything"},
        {"retrieval-routing controller",
         "map a diagnosis brief to alternative bundles of operator skills representing distinct "
         "optimization routes"},
        {"plan-composition and budgeting controller",
         "compose retrieved skills into a small set of concrete plans and spend a fixed "
         "candidate budget across them"},
    };

    std::vector<MetaSkill> metas;
    for (int i = 0; i < 3; ++i) {
        PromptRequest request;
        request.role_id = "meta_induce";
        request.template_id = "meta_induce";
        request.rendered_prompt =
            render_template("meta_induce", {{"controller_role", controllers[i].role},
                                            {"controller_purpose", controllers[i].purpose},
                                            {"skill_index", index}});
        const ParsedRecord record = complete_structured(gateway, request, "meta_card");

        MetaSkill meta;
        meta.skill_id = run_id + "-meta-" + std::to_string(i + 1);
        meta.language = language;
        meta.name = record.at("Name");
        meta.description = record.at("Description");
        meta.overview = record.at("Overview");
        meta.core_loop = record.at("CoreLoop");
        meta.routing_heuristics = record.at("RoutingHeuristics");
        meta.budgeting_control_logic = record.at("BudgetingControlLogic");
        meta.decision_checklist = record.at("DecisionChecklist");
        metas.push_back(std::move(meta));
    }
    return metas;
}

// ---------------- persistence ----------------

namespace {

struct CardText {
    std::map<std::string, std::string> front;     // front-matter key -> value
    std::map<std::string, std::string> sections;  // heading -> body
};

CardText parse_card(const std::string& text, const std::string& file) {
    auto lines = util::split_lines(text);
    size_t i = 0;
    if (i >= lines.size() || util::trim(lines[i]) != "---")
        throw LoadError("card missing front-matter open", file);
    ++i;
    CardText card;
    for (; i < lines.size() && util::trim(lines[i]) != "---"; ++i) {
        auto colon = lines[i].find(':');
        if (colon == std::string::npos) continue;
        card.front[util::trim(lines[i].substr(0, colon))] = util::trim(lines[i].substr(colon + 1));
    }
    if (i >= lines.size()) throw LoadError("card missing front-matter close", file);
    ++i;
    std::string heading;
    std::string body;
    auto flush = [&] {
        if (!heading.empty()) card.sections[heading] = util::trim(body);
        body.clear();
    };
    for (; i < lines.size(); ++i) {
        if (lines[i].rfind("## ", 0) == 0) {
            flush();
            heading = util::trim(lines[i].substr(3));
        } else if (!heading.empty()) {
            body += lines[i];
            body.push_back('\n');
        }
    }
    flush();
    return card;
}

std::string front_or_throw(const CardText& card, const std::string& key, const std::string& file) {
    auto it = card.front.find(key);
    if (it == card.front.end() || it->second.empty())
        throw LoadError("card missing front-matter field '" + key + "'", file);
    return it->second;
}

std::string section_or_throw(const CardText& card, const std::string& heading,
                             const std::string& file) {
    auto it = card.sections.find(heading);
    if (it == card.sections.end() || it->second.empty())
        throw LoadError("card missing body section '" + heading + "'", file);
    return it->second;
}

}  // namespace

void save_registry(const SkillRegistry& registry, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    json index = {
        {"run_id", registry.provenance.run_id},
        {"provenance",
         {{"corpus", registry.provenance.corpus},
          {"seed", registry.provenance.seed},
          {"cluster_count", registry.provenance.cluster_count}}},
        {"operator_skills", json::array()},
        {"meta_skills", json::array()},
    };
    for (const auto& skill : registry.operator_skills) {
        const std::string file = skill.skill_id + ".md";
        util::write_file(dir / file, render_operator_card(skill));
        index["operator_skills"].push_back(file);
    }
    for (const auto& skill : registry.meta_skills) {
        const std::string file = skill.skill_id + ".md";
        util::write_file(dir / file, render_meta_card(skill));
        index["meta_skills"].push_back(file);
    }
    util::write_file(dir / "index.json", index.dump(2) + "\n");
}

SkillRegistry load_registry(const std::filesystem::path& dir) {
    json index;
    try {
        index = json::parse(util::read_file(dir / "index.json"));
    } catch (const json::parse_error& e) {
        throw LoadError("index.json is not valid JSON: " + std::string(e.what()), "index.json");
    }

    SkillRegistry registry;
    try {
        registry.provenance.run_id = index.value("run_id", "");
        const auto& prov = index.at("provenance");
        registry.provenance.corpus = prov.value("corpus", "");
        registry.provenance.seed = prov.value("seed", std::uint64_t{0});
        registry.provenance.cluster_count = prov.value("cluster_count", 0);
    } catch (const json::exception& e) {
        throw LoadError(std::string("index.json: ") + e.what(), "index.json");
    }

    std::map<std::string, bool> seen;
    auto check_unique = [&](const std::string& skill_id, const std::string& file) {
        if (seen.count(skill_id)) throw LoadError("duplicate skill_id '" + skill_id + "'", file);
        seen[skill_id] = true;
    };

    for (const auto& entry : index.value("operator_skills", std::vector<std::string>{})) {
        const auto card = parse_card(util::read_file(dir / entry), entry);
        OperatorSkill skill;
        skill.skill_id = front_or_throw(card, "skill_id", entry);
        check_unique(skill.skill_id, entry);
        if (front_or_throw(card, "type", entry) != "operator")
            throw LoadError("expected type 'operator'", entry);
        skill.language = front_or_throw(card, "language", entry);
        skill.name = front_or_throw(card, "name", entry);
        skill.description = front_or_throw(card, "description", entry);
        skill.family = front_or_throw(card, "family", entry);
        auto tags = card.front.find("tags");
        if (tags != card.front.end()) skill.tags = util::split_list(tags->second);
        auto triggers = card.front.find("triggers");
        if (triggers != card.front.end()) skill.triggers = util::split_list(triggers->second);
        for (const auto& [heading, key] : kOperatorSections)
            operator_section(skill, key) = section_or_throw(card, heading, entry);
        registry.operator_skills.push_back(std::move(skill));
    }

    for (const auto& entry : index.value("meta_skills", std::vector<std::string>{})) {
        const auto card = parse_card(util::read_file(dir / entry), entry);
        MetaSkill skill;
        skill.skill_id = front_or_throw(card, "skill_id", entry);
        check_unique(skill.skill_id, entry);
        if (front_or_throw(card, "type", entry) != "meta")
            throw LoadError("expected type 'meta'", entry);
        skill.language = front_or_throw(card, "language", entry);
        skill.name = front_or_throw(card, "name", entry);
        skill.description = front_or_throw(card, "description", entry);
        for (const auto& [heading, key] : kMetaSections)
            meta_section(skill, key) = section_or_throw(card, heading, entry);
        registry.meta_skills.push_back(std::move(skill));
    }
    return registry;
}

// ---------------- usage analytics ----------------

UsageReport usage_stats(const SkillRegistry& registry, const std::vector<UsageEvent>& runs) {
    UsageReport report;
    std::map<std::string, std::map<std::string, bool>> seen_per_candidate;
    for (const auto& run : runs) {
        for (const auto& skill_id : run.skill_ids) {
            if (!registry.find_operator(skill_id) && !registry.find_meta(skill_id))
                throw ConsistencyError("usage run references unknown skill_id '" + skill_id + "'");
            auto& seen = seen_per_candidate[run.candidate_id];
            if (seen.count(skill_id)) continue;  // once per (candidate, skill)
            seen[skill_id] = true;
            ++report.per_skill[skill_id];
            ++report.total_pairs;
        }
    }
    if (report.total_pairs == 0) return report;

    const double total = static_cast<double>(report.total_pairs);
    std::map<std::string, double> family_counts;
    std::vector<int> counts;
    for (const auto& [skill_id, count] : report.per_skill) {
        counts.push_back(count);
        const double p = count / total;
        report.entropy -= p * std::log(p);
        const OperatorSkill* op = registry.find_operator(skill_id);
        family_counts[op ? op->family : "(meta)"] += count;
    }
    if (report.entropy < 0.0) report.entropy = 0.0;  // clamp -0.0 from p == 1
    report.effective_skills = std::exp(report.entropy);
    for (const auto& [family, count] : family_counts)
        report.family_share_pct[family] = 100.0 * count / total;

    std::sort(counts.begin(), counts.end(), std::greater<>());
    int top5 = 0;
    for (size_t i = 0; i < counts.size() && i < 5; ++i) top5 += counts[i];
    report.top5_share_pct = 100.0 * top5 / total;
    return report;
}

}  // namespace skillopt
