// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 skillopt contributors

#pragma once

#include <string>
#include <vector>

namespace skillopt {

struct TestCase {
    std::string input;
    std::string expected;
};

struct RunLimits {
    double wall_ms = 10000.0;
    int mem_mb = 1024;
};

enum class Verdict { Pass, Fail, Timeout, ErrorVerdict };

struct RunOutcome {
    Verdict verdict = Verdict::ErrorVerdict;
    double wall_ms = 0.0;
};

/// Executes one program on one test. Implementations never mutate their
/// inputs and report timeouts distinctly from wrong answers.
class ExecutionRunner {
public:
    virtual ~ExecutionRunner() = default;
    virtual RunOutcome run(const std::string& program, const std::string& language,
                           const TestCase& test, const RunLimits& limits) = 0;
};

/// Invokes an external runner command as
///   <command...> <program_path> <language> <wall_limit_ms>
/// with the test input on stdin. The runner prints the program's output
/// followed by a final structured line
///   RUNNER: verdict=<ok|timeout|error> wall_ms=<float>
/// The harness compares the program output against the expected output after
/// trailing-whitespace normalization and reads the wall time from that line.
/// A missing or malformed structured line is a MeasurementError
/// (infrastructure failure, not a candidate failure).
class SubprocessRunner final : public ExecutionRunner {
public:
    explicit SubprocessRunner(std::vector<std::string> command);
    RunOutcome run(const std::string& program, const std::string& language, const TestCase& test,
                   const RunLimits& limits) override;

private:
    std::vector<std::string> command_;
};

}  // namespace skillopt
