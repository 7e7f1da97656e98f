// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 skillopt contributors

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace skillopt {

struct PromptRequest {
    std::string role_id;      // pipeline step that issued the request
    std::string template_id;
    std::string rendered_prompt;
    double temperature = 0.0;
    int max_output = 4096;
};

struct CompletionResponse {
    std::string text;
    std::optional<int> prompt_tokens;
    std::optional<int> completion_tokens;
    std::string backend_id;
};

/// Pure function of (template_id, rendered_prompt). Temperature and backend
/// identity are deliberately excluded so transcripts survive config changes.
std::string request_fingerprint(const PromptRequest& request);

/// Renders a registered template, substituting every `{placeholder}`.
/// Throws TemplateError for unknown templates or unbound placeholders.
std::string render_template(const std::string& template_id,
                            const std::map<std::string, std::string>& bindings);

/// The substitution engine behind render_template, usable on raw template
/// text. Deterministic; unbound placeholders throw TemplateError.
std::string render_text(const std::string& template_text,
                        const std::map<std::string, std::string>& bindings);

bool has_template(const std::string& template_id);

// ---------------- backends ----------------

class Backend {
public:
    virtual ~Backend() = default;
    virtual CompletionResponse complete(const PromptRequest& request) = 0;
    virtual std::string id() const = 0;
};

struct LiveBackendConfig {
    std::string endpoint;             // e.g. http://host:8000/v1  (chat-completions style)
    std::string model;
    std::string auth_env = "SKILLOPT_API_KEY";  // env var holding the bearer token
    int max_attempts = 3;
    int backoff_ms = 250;             // doubled per retry
    int timeout_sec = 120;
    int max_in_flight = 4;
};

/// HTTP backend speaking the OpenAI-compatible /chat/completions protocol.
/// Transient failures (network, 5xx, 429) are retried with exponential backoff
/// up to max_attempts, then surface as BackendError with retry metadata.
std::unique_ptr<Backend> make_live_backend(LiveBackendConfig config);

// ---------------- transcripts ----------------

struct TranscriptEntry {
    std::string fingerprint;
    std::string template_id;
    std::string role_id;
    std::string response;
};

/// Ordered transcript of (fingerprint, response) entries, persisted as JSONL.
/// Fingerprints are unique within a transcript.
class Transcript {
public:
    Transcript() = default;
    static Transcript load(const std::filesystem::path& path);  // ManifestError / DuplicateId

    std::optional<std::string> find(const std::string& fingerprint) const;
    void append(TranscriptEntry entry);  // DuplicateId on repeated fingerprint
    void save(const std::filesystem::path& path) const;
    size_t size() const { return entries_.size(); }
    const std::vector<TranscriptEntry>& entries() const { return entries_; }

private:
    std::vector<TranscriptEntry> entries_;
    std::map<std::string, size_t> by_fingerprint_;
};

// ---------------- gateway ----------------

enum class GatewayMode { Live, Record, Replay };

/// Single choke point for all model interactions. Replay mode resolves every
/// request from the transcript (miss is fatal); record mode consults the
/// transcript first, falls through to the backend, and appends the result.
/// Safe for concurrent complete() calls.
class Gateway {
public:
    static Gateway live(std::shared_ptr<Backend> backend);
    static Gateway record(std::shared_ptr<Backend> backend, std::filesystem::path transcript_path);
    static Gateway replay(std::filesystem::path transcript_path);

    CompletionResponse complete(const PromptRequest& request);

    GatewayMode mode() const { return mode_; }
    const Transcript& transcript() const { return transcript_; }

private:
    Gateway(GatewayMode mode, std::shared_ptr<Backend> backend,
            std::optional<std::filesystem::path> transcript_path);

    GatewayMode mode_;
    std::shared_ptr<Backend> backend_;
    std::optional<std::filesystem::path> transcript_path_;
    Transcript transcript_;
    mutable std::mutex mutex_;
};

// ---------------- structured output ----------------

/// Field map parsed from a fenced, field-labeled response block. Keys are the
/// schema's canonical labels (e.g. "ProblemBrief"); list-valued fields hold
/// their raw text and are split with list().
struct ParsedRecord {
    std::string schema_id;
    std::map<std::string, std::string> fields;

    const std::string& at(const std::string& label) const;
    std::string get(const std::string& label, const std::string& fallback = "") const;
    std::vector<std::string> list(const std::string& label) const;  // semicolon-separated
};

bool has_schema(const std::string& schema_id);

/// Field labels of a registered schema, required first. Throws for unknown ids.
std::vector<std::string> schema_labels(const std::string& schema_id);

/// Parses the first fenced block of `response` against a registered schema
/// (trace, signature, profile, operator_card, meta_card, brief, bundle, plan).
/// Missing or empty required fields raise ParseError naming the field.
ParsedRecord parse_structured(const CompletionResponse& response, const std::string& schema_id);

/// Parses every fenced block carrying at least one schema label; blocks that
/// match no label (e.g. code listings) are skipped.
std::vector<ParsedRecord> parse_structured_list(const CompletionResponse& response,
                                                const std::string& schema_id);

/// Content of the first fenced block, for code-bearing responses. nullopt when
/// the response has no fenced block.
std::optional<std::string> extract_fenced_block(const std::string& response_text);

/// complete() + parse_structured() with the gateway's correction policy: a
/// parse failure triggers exactly one re-prompt with an appended correction
/// instruction, then the error surfaces. In replay mode a missing correction
/// entry surfaces the original parse error instead of TranscriptMiss.
ParsedRecord complete_structured(Gateway& gateway, const PromptRequest& request,
                                 const std::string& schema_id);

/// Builds the follow-up request used by the correction policy; exposed so
/// multi-record callers (bundles, plans) can reuse the same convention.
PromptRequest correction_request(const PromptRequest& original, const std::string& complaint);

}  // namespace skillopt
