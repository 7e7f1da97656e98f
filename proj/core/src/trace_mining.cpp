// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 skillopt contributors

#include "skillopt/trace_mining.hpp"

#include <algorithm>

#include <json.hpp>

#include "skillopt/errors.hpp"
#include "skillopt/util.hpp"

namespace skillopt {

using nlohmann::json;

namespace {

std::string cap(std::string text, size_t limit) {
    if (text.size() > limit) text.resize(limit);
    return text;
}

}  // namespace

OptimizationTrace extract_trace(const SolutionPair& pair, Gateway& gateway,
                                const TraceMiningOptions& options) {
    PromptRequest request;
    request.role_id = "trace_extract";
    request.template_id = "trace_extract";
    request.temperature = options.temperature;
    request.rendered_prompt = render_template(
        "trace_extract", {{"pair_id", pair.pair_id},
                          {"task_id", pair.task_id},
                          {"language", pair.language},
                          {"task_context", pair.task_context.empty() ? "(none provided)"
                                                                     : pair.task_context},
                          {"slow_code", pair.slow_code},
                          {"fast_code", pair.fast_code}});
    ParsedRecord record;
    try {
        record = complete_structured(gateway, request, "trace");
    } catch (const ParseError& e) {
        throw ParseError(std::string(e.what()) + " (pair " + pair.pair_id + ")", e.field);
    }

    OptimizationTrace trace;
    trace.pair_id = pair.pair_id;
    trace.problem_brief = cap(record.at("ProblemBrief"), options.max_field_chars);
    trace.slow_audit = cap(record.at("SlowAudit"), options.max_field_chars);
    trace.fast_audit = cap(record.at("FastAudit"), options.max_field_chars);
    trace.delta_summary = cap(record.at("DeltaSummary"), options.max_field_chars);
    return trace;
}

Signature abstract_signature(const OptimizationTrace& trace, Gateway& gateway,
                             const TraceMiningOptions& options) {
    PromptRequest request;
    request.role_id = "signature_abstract";
    request.template_id = "signature_abstract";
    request.temperature = options.temperature;
    request.rendered_prompt =
        render_template("signature_abstract", {{"pair_id", trace.pair_id},
                                               {"problem_brief", trace.problem_brief},
                                               {"slow_audit", trace.slow_audit},
                                               {"fast_audit", trace.fast_audit},
                                               {"delta_summary", trace.delta_summary}});
    ParsedRecord record;
    try {
        record = complete_structured(gateway, request, "signature");
    } catch (const ParseError& e) {
        throw ParseError(std::string(e.what()) + " (pair " + trace.pair_id + ")", e.field);
    }

    Signature sig;
    sig.pair_id = trace.pair_id;
    sig.optimization_type = record.at("OptimizationType");
    sig.complexity_shift = record.get("ComplexityShift");
    sig.triggers = record.list("Triggers");
    sig.bottleneck_category = record.at("BottleneckCategory");
    sig.problem_characteristics = record.list("ProblemCharacteristics");
    return sig;
}

std::string serialize_signature(const Signature& sig) {
    auto triggers = sig.triggers;
    auto characteristics = sig.problem_characteristics;
    std::sort(triggers.begin(), triggers.end());
    std::sort(characteristics.begin(), characteristics.end());

    std::vector<std::string> parts;
    auto push = [&parts](const std::string& text) {
        std::string normalized = util::normalize_ws(text);
        if (!normalized.empty()) parts.push_back(std::move(normalized));
    };
    push(sig.optimization_type);
    push(sig.complexity_shift);
    push(sig.bottleneck_category);
    for (const auto& t : triggers) push(t);
    for (const auto& c : characteristics) push(c);
    return util::join(parts, " ");
}

// ---- stores ----

void save_traces(const std::vector<OptimizationTrace>& traces, const std::filesystem::path& path) {
    std::string out;
    for (const auto& t : traces) {
        json rec = {{"pair_id", t.pair_id},
                    {"problem_brief", t.problem_brief},
                    {"slow_audit", t.slow_audit},
                    {"fast_audit", t.fast_audit},
                    {"delta_summary", t.delta_summary}};
        out += rec.dump();
        out.push_back('\n');
    }
    util::write_file(path, out);
}

std::vector<OptimizationTrace> load_traces(const std::filesystem::path& path) {
    std::vector<OptimizationTrace> traces;
    for (const auto& line : util::split_lines(util::read_file(path))) {
        if (util::trim(line).empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
            traces.push_back({rec.at("pair_id").get<std::string>(),
                              rec.at("problem_brief").get<std::string>(),
                              rec.at("slow_audit").get<std::string>(),
                              rec.at("fast_audit").get<std::string>(),
                              rec.at("delta_summary").get<std::string>()});
        } catch (const json::exception& e) {
            throw ManifestError("trace store " + path.string() + ": " + e.what());
        }
    }
    return traces;
}

void save_signatures(const std::vector<Signature>& sigs, const std::filesystem::path& path) {
    std::string out;
    for (const auto& s : sigs) {
        json rec = {{"pair_id", s.pair_id},
                    {"optimization_type", s.optimization_type},
                    {"complexity_shift", s.complexity_shift},
                    {"triggers", s.triggers},
                    {"bottleneck_category", s.bottleneck_category},
                    {"problem_characteristics", s.problem_characteristics}};
        out += rec.dump();
        out.push_back('\n');
    }
    util::write_file(path, out);
}

std::vector<Signature> load_signatures(const std::filesystem::path& path) {
    std::vector<Signature> sigs;
    for (const auto& line : util::split_lines(util::read_file(path))) {
        if (util::trim(line).empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
            Signature s;
            s.pair_id = rec.at("pair_id").get<std::string>();
            s.optimization_type = rec.at("optimization_type").get<std::string>();
            s.complexity_shift = rec.value("complexity_shift", "");
            s.triggers = rec.value("triggers", std::vector<std::string>{});
            s.bottleneck_category = rec.at("bottleneck_category").get<std::string>();
            s.problem_characteristics =
                rec.value("problem_characteristics", std::vector<std::string>{});
            sigs.push_back(std::move(s));
        } catch (const json::exception& e) {
            throw ManifestError("signature store " + path.string() + ": " + e.what());
        }
    }
    return sigs;
}

}  // namespace skillopt
