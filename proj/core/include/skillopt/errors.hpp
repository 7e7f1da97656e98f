// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 skillopt contributors

#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace skillopt {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- corpus ----

struct InvalidPair : Error {
    std::string pair_id;
    InvalidPair(std::string pair, const std::string& msg)
        : Error("invalid pair '" + pair + "': " + msg), pair_id(std::move(pair)) {}
};

struct DuplicateId : Error {
    std::string id;
    explicit DuplicateId(std::string dup)
        : Error("duplicate id: " + dup), id(std::move(dup)) {}
};

struct MissingFile : Error {
    std::string path;
    explicit MissingFile(std::string p) : Error("missing file: " + p), path(std::move(p)) {}
};

struct ManifestError : Error {
    using Error::Error;
};

// ---- llm gateway ----

struct TemplateError : Error {
    using Error::Error;
};

struct ParseError : Error {
    std::string field;  // offending field label, empty when framing itself is broken
    explicit ParseError(const std::string& msg, std::string field_name = "")
        : Error("parse error: " + msg), field(std::move(field_name)) {}
};

struct BackendError : Error {
    int attempts = 0;
    bool retryable = false;
    BackendError(const std::string& msg, int tries, bool transient)
        : Error("backend error after " + std::to_string(tries) + " attempt(s): " + msg),
          attempts(tries), retryable(transient) {}
};

struct TranscriptMiss : Error {
    std::string fingerprint;
    explicit TranscriptMiss(std::string fp)
        : Error("transcript has no entry for fingerprint " + fp), fingerprint(std::move(fp)) {}
};

// ---- clustering ----

struct InsufficientData : Error {
    using Error::Error;
};

struct EmbedError : Error {
    using Error::Error;
};

struct ShapeError : Error {
    using Error::Error;
};

struct InvalidClustering : Error {
    using Error::Error;
};

struct InvalidK : Error {
    using Error::Error;
};

// ---- skill library ----

struct LoadError : Error {
    std::string record;  // offending file or skill id
    explicit LoadError(const std::string& msg, std::string rec = "")
        : Error("registry load error: " + msg), record(std::move(rec)) {}
};

struct ConsistencyError : Error {
    using Error::Error;
};

// ---- optimizer ----

struct RetrievalError : Error {
    using Error::Error;
};

struct PlanError : Error {
    using Error::Error;
};

// ---- eval harness ----

struct InsufficientTests : Error {
    using Error::Error;
};

struct MeasurementError : Error {
    using Error::Error;
};

struct EvalError : Error {
    using Error::Error;
};

}  // namespace skillopt
