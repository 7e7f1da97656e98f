// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 skillopt contributors

#include "skillopt/gateway.hpp"

#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "skillopt/errors.hpp"
#include "skillopt/util.hpp"

namespace skillopt {

using nlohmann::json;

std::string request_fingerprint(const PromptRequest& request) {
    std::string key = request.template_id;
    key.push_back('\x1f');
    key += request.rendered_prompt;
    return util::fnv1a64_hex(key);
}

// ---------------- live backend ----------------

namespace {

struct SplitUrl {
    std::string host;  // scheme://authority
    std::string base;  // path prefix, no trailing slash
};

SplitUrl split_url(const std::string& endpoint) {
    auto scheme_end = endpoint.find("://");
    size_t path_start = endpoint.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    if (path_start == std::string::npos) return {endpoint, ""};
    std::string base = endpoint.substr(path_start);
    while (!base.empty() && base.back() == '/') base.pop_back();
    return {endpoint.substr(0, path_start), base};
}

class LiveBackend final : public Backend {
public:
    explicit LiveBackend(LiveBackendConfig config) : config_(std::move(config)) {}

    CompletionResponse complete(const PromptRequest& request) override {
        InFlightGuard guard(*this);
        const SplitUrl url = split_url(config_.endpoint);
        json body = {
            {"model", config_.model},
            {"messages", json::array({json{{"role", "user"}, {"content", request.rendered_prompt}}})},
            {"temperature", request.temperature},
            {"max_tokens", request.max_output},
        };
        httplib::Headers headers;
        if (const char* token = std::getenv(config_.auth_env.c_str()); token && *token)
            headers.emplace("Authorization", std::string("Bearer ") + token);

        std::string last_error;
        for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
            httplib::Client client(url.host);
            client.set_read_timeout(config_.timeout_sec, 0);
            client.set_connection_timeout(config_.timeout_sec, 0);
            auto res = client.Post(url.base + "/chat/completions", headers, body.dump(),
                                   "application/json");
            if (!res) {
                last_error = "transport: " + httplib::to_string(res.error());
            } else if (res->status == 429 || res->status >= 500) {
                last_error = "http status " + std::to_string(res->status);
            } else if (res->status != 200) {
                throw BackendError("http status " + std::to_string(res->status), attempt, false);
            } else {
                return parse_completion(res->body);
            }
            if (attempt < config_.max_attempts) {
                auto delay = std::chrono::milliseconds(config_.backoff_ms << (attempt - 1));
                std::this_thread::sleep_for(delay);
            }
        }
        throw BackendError(last_error, config_.max_attempts, true);
    }

    std::string id() const override { return "live:" + config_.model; }

private:
    CompletionResponse parse_completion(const std::string& body) const {
        json doc;
        try {
            doc = json::parse(body);
        } catch (const json::parse_error&) {
            throw BackendError("response is not valid JSON", 1, false);
        }
        CompletionResponse out;
        out.backend_id = id();
        try {
            out.text = doc.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const json::exception&) {
            throw BackendError("response lacks choices[0].message.content", 1, false);
        }
        if (doc.contains("usage")) {
            const auto& usage = doc["usage"];
            if (usage.contains("prompt_tokens")) out.prompt_tokens = usage["prompt_tokens"].get<int>();
            if (usage.contains("completion_tokens"))
                out.completion_tokens = usage["completion_tokens"].get<int>();
        }
        return out;
    }

    // Bounds concurrent requests without dragging in <semaphore> users.
    class InFlightGuard {
    public:
        explicit InFlightGuard(LiveBackend& owner) : owner_(owner) {
            std::unique_lock lock(owner_.slots_mutex_);
            owner_.slots_cv_.wait(lock, [&] { return owner_.in_flight_ < owner_.config_.max_in_flight; });
            ++owner_.in_flight_;
        }
        ~InFlightGuard() {
            {
                std::lock_guard lock(owner_.slots_mutex_);
                --owner_.in_flight_;
            }
            owner_.slots_cv_.notify_one();
        }

    private:
        LiveBackend& owner_;
    };

    LiveBackendConfig config_;
    std::mutex slots_mutex_;
    std::condition_variable slots_cv_;
    int in_flight_ = 0;
};

}  // namespace

std::unique_ptr<Backend> make_live_backend(LiveBackendConfig config) {
    return std::make_unique<LiveBackend>(std::move(config));
}

// ---------------- transcript ----------------

Transcript Transcript::load(const std::filesystem::path& path) {
    Transcript t;
    const std::string raw = util::read_file(path);
    size_t line_no = 0;
    for (const auto& line : util::split_lines(raw)) {
        ++line_no;
        if (util::trim(line).empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
            TranscriptEntry entry;
            entry.fingerprint = rec.at("fingerprint").get<std::string>();
            entry.template_id = rec.value("template_id", "");
            entry.role_id = rec.value("role_id", "");
            entry.response = rec.at("response").get<std::string>();
            t.append(std::move(entry));
        } catch (const json::exception& e) {
            throw ManifestError("transcript line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return t;
}

std::optional<std::string> Transcript::find(const std::string& fingerprint) const {
    auto it = by_fingerprint_.find(fingerprint);
    if (it == by_fingerprint_.end()) return std::nullopt;
    return entries_[it->second].response;
}

void Transcript::append(TranscriptEntry entry) {
    if (by_fingerprint_.count(entry.fingerprint)) throw DuplicateId(entry.fingerprint);
    by_fingerprint_.emplace(entry.fingerprint, entries_.size());
    entries_.push_back(std::move(entry));
}

namespace {

std::string transcript_line(const TranscriptEntry& entry) {
    json rec = {{"fingerprint", entry.fingerprint},
                {"template_id", entry.template_id},
                {"role_id", entry.role_id},
                {"response", entry.response}};
    return rec.dump() + "\n";
}

}  // namespace

void Transcript::save(const std::filesystem::path& path) const {
    std::string out;
    for (const auto& entry : entries_) out += transcript_line(entry);
    util::write_file(path, out);
}

// ---------------- gateway ----------------

Gateway::Gateway(GatewayMode mode, std::shared_ptr<Backend> backend,
                 std::optional<std::filesystem::path> transcript_path)
    : mode_(mode), backend_(std::move(backend)), transcript_path_(std::move(transcript_path)) {
    if (mode_ != GatewayMode::Live && transcript_path_ &&
        std::filesystem::exists(*transcript_path_)) {
        transcript_ = Transcript::load(*transcript_path_);
    } else if (mode_ == GatewayMode::Replay) {
        throw MissingFile(transcript_path_ ? transcript_path_->string() : "<transcript>");
    }
}

Gateway Gateway::live(std::shared_ptr<Backend> backend) {
    return Gateway(GatewayMode::Live, std::move(backend), std::nullopt);
}

Gateway Gateway::record(std::shared_ptr<Backend> backend, std::filesystem::path transcript_path) {
    return Gateway(GatewayMode::Record, std::move(backend), std::move(transcript_path));
}

Gateway Gateway::replay(std::filesystem::path transcript_path) {
    return Gateway(GatewayMode::Replay, nullptr, std::move(transcript_path));
}

CompletionResponse Gateway::complete(const PromptRequest& request) {
    if (request.rendered_prompt.empty()) throw Error("empty rendered prompt");
    const std::string fp = request_fingerprint(request);

    if (mode_ != GatewayMode::Live) {
        std::lock_guard lock(mutex_);
        if (auto hit = transcript_.find(fp)) {
            return CompletionResponse{*hit, std::nullopt, std::nullopt, "transcript"};
        }
        if (mode_ == GatewayMode::Replay) throw TranscriptMiss(fp);
    }

    // Live call (live mode, or record-mode miss).
    CompletionResponse response = backend_->complete(request);
    if (mode_ == GatewayMode::Record) {
        std::lock_guard lock(mutex_);
        if (!transcript_.find(fp)) {
            TranscriptEntry entry{fp, request.template_id, request.role_id, response.text};
            const std::string line = transcript_line(entry);
            transcript_.append(std::move(entry));
            if (transcript_path_->has_parent_path())
                std::filesystem::create_directories(transcript_path_->parent_path());
            std::ofstream out(*transcript_path_, std::ios::binary | std::ios::app);
            out.write(line.data(), static_cast<std::streamsize>(line.size()));
        }
    }
    return response;
}

// ---------------- structured parsing ----------------

namespace {

struct SchemaField {
    std::string label;    // canonical label as emitted in prompts, e.g. "ProblemBrief"
    bool required = true;
};

const std::map<std::string, std::vector<SchemaField>>& schema_table() {
    static const std::map<std::string, std::vector<SchemaField>> table = {
        {"trace",
         {{"ProblemBrief"}, {"SlowAudit"}, {"FastAudit"}, {"DeltaSummary"}}},
        {"signature",
         {{"OptimizationType"},
          {"ComplexityShift"},
          {"BottleneckCategory"},
          {"Triggers", false},
          {"ProblemCharacteristics", false}}},
        {"profile",
         {{"SharedMechanism"}, {"RepresentativeTriggers", false}}},
        {"operator_card",
         {{"Name"},
          {"Description"},
          {"Family"},
          {"WhenToUse"},
          {"TransformationSteps"},
          {"ExpectedComplexityEffect"},
          {"CommonPitfalls"},
          {"WhenNotToUse"},
          {"MinimalExample"},
          {"Tags", false},
          {"Triggers", false}}},
        {"meta_card",
         {{"Name"},
          {"Description"},
          {"Overview"},
          {"CoreLoop"},
          {"RoutingHeuristics"},
          {"BudgetingControlLogic"},
          {"DecisionChecklist"}}},
        {"brief",
         {{"LikelyBottlenecks"},
          {"OptimizationScope"},
          {"DominantOperations", false},
          {"InferredConstraints", false}}},
        {"bundle",
         {{"SkillIds"}, {"Rationale", false}}},
        {"plan",
         {{"Strategy"},
          {"Steps"},
          {"AnticipatedImprovement", false},
          {"Risks", false}}},
    };
    return table;
}

const std::vector<SchemaField>& schema_or_throw(const std::string& schema_id) {
    const auto& table = schema_table();
    auto it = table.find(schema_id);
    if (it == table.end()) throw ParseError("unknown schema '" + schema_id + "'");
    return it->second;
}

std::vector<std::string> fenced_blocks(const std::string& text) {
    std::vector<std::string> blocks;
    auto lines = util::split_lines(text);
    std::string current;
    bool inside = false;
    for (const auto& line : lines) {
        const std::string t = util::trim(line);
        if (t.rfind("```", 0) == 0) {
            if (inside) {
                blocks.push_back(current);
                current.clear();
                inside = false;
            } else {
                inside = true;
            }
            continue;
        }
        if (inside) {
            current += line;
            current.push_back('\n');
        }
    }
    return blocks;
}

// Parses `FieldLabel: value` lines; a field's value continues until the next
// known label or the end of the block.
std::map<std::string, std::string> parse_labeled_block(const std::string& block,
                                                       const std::vector<SchemaField>& schema) {
    std::map<std::string, std::string> label_by_key;
    for (const auto& f : schema) label_by_key[util::label_key(f.label)] = f.label;

    std::map<std::string, std::string> fields;
    std::string active_label;
    for (const auto& line : util::split_lines(block)) {
        bool matched = false;
        if (auto colon = line.find(':'); colon != std::string::npos && colon > 0) {
            const std::string key = util::label_key(line.substr(0, colon));
            auto it = label_by_key.find(key);
            if (it != label_by_key.end()) {
                active_label = it->second;
                fields[active_label] = util::trim(line.substr(colon + 1));
                matched = true;
            }
        }
        if (!matched && !active_label.empty()) {
            std::string& value = fields[active_label];
            if (!value.empty()) value.push_back('\n');
            value += util::trim(line);
        }
    }
    for (auto& [label, value] : fields) value = util::trim(value);
    return fields;
}

ParsedRecord validate_record(std::map<std::string, std::string> fields,
                             const std::string& schema_id,
                             const std::vector<SchemaField>& schema) {
    for (const auto& f : schema) {
        auto it = fields.find(f.label);
        if (f.required && (it == fields.end() || it->second.empty()))
            throw ParseError("missing required field: " + f.label, f.label);
    }
    ParsedRecord record;
    record.schema_id = schema_id;
    record.fields = std::move(fields);
    return record;
}

}  // namespace

const std::string& ParsedRecord::at(const std::string& label) const {
    auto it = fields.find(label);
    if (it == fields.end()) throw ParseError("missing required field: " + label, label);
    return it->second;
}

std::string ParsedRecord::get(const std::string& label, const std::string& fallback) const {
    auto it = fields.find(label);
    return it == fields.end() ? fallback : it->second;
}

std::vector<std::string> ParsedRecord::list(const std::string& label) const {
    auto it = fields.find(label);
    if (it == fields.end()) return {};
    return util::split_list(it->second);
}

bool has_schema(const std::string& schema_id) { return schema_table().count(schema_id) > 0; }

std::vector<std::string> schema_labels(const std::string& schema_id) {
    std::vector<std::string> labels;
    for (const auto& f : schema_or_throw(schema_id)) labels.push_back(f.label);
    return labels;
}

ParsedRecord parse_structured(const CompletionResponse& response, const std::string& schema_id) {
    const auto& schema = schema_or_throw(schema_id);
    auto blocks = fenced_blocks(response.text);
    // Lenient framing: a response without fences is treated as one block.
    const std::string body = blocks.empty() ? response.text : blocks.front();
    return validate_record(parse_labeled_block(body, schema), schema_id, schema);
}

std::vector<ParsedRecord> parse_structured_list(const CompletionResponse& response,
                                                const std::string& schema_id) {
    const auto& schema = schema_or_throw(schema_id);
    std::vector<ParsedRecord> records;
    for (const auto& block : fenced_blocks(response.text)) {
        auto fields = parse_labeled_block(block, schema);
        if (fields.empty()) continue;  // unrelated block (prose, code, ...)
        records.push_back(validate_record(std::move(fields), schema_id, schema));
    }
    return records;
}

std::optional<std::string> extract_fenced_block(const std::string& response_text) {
    auto blocks = fenced_blocks(response_text);
    if (blocks.empty()) return std::nullopt;
    return blocks.front();
}

PromptRequest correction_request(const PromptRequest& original, const std::string& complaint) {
    PromptRequest fixed = original;
    fixed.rendered_prompt += "\n\nYour previous answer could not be parsed: " + complaint +
                             ". Answer again, following the required fenced block format exactly.";
    return fixed;
}

ParsedRecord complete_structured(Gateway& gateway, const PromptRequest& request,
                                 const std::string& schema_id) {
    CompletionResponse first = gateway.complete(request);
    try {
        return parse_structured(first, schema_id);
    } catch (const ParseError& original) {
        PromptRequest retry = correction_request(request, original.what());
        try {
            return parse_structured(gateway.complete(retry), schema_id);
        } catch (const TranscriptMiss&) {
            throw original;  // replay transcripts only know the recorded exchange
        }
    }
}

}  // namespace skillopt
