// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 skillopt contributors

#include "skillopt/runner.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <filesystem>

#include "skillopt/errors.hpp"
#include "skillopt/util.hpp"

namespace skillopt {

namespace {

struct ChildResult {
    std::string stdout_text;
    int exit_code = -1;
};

// Runs argv with `input` on stdin and captures stdout. Blocking; the runner
// command is responsible for enforcing its own limits.
ChildResult run_child(const std::vector<std::string>& argv, const std::string& input) {
    int in_pipe[2];
    int out_pipe[2];
    if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0)
        throw MeasurementError(std::string("pipe: ") + std::strerror(errno));

    pid_t pid = fork();
    if (pid < 0) throw MeasurementError(std::string("fork: ") + std::strerror(errno));

    if (pid == 0) {
        dup2(in_pipe[0], STDIN_FILENO);
        dup2(out_pipe[1], STDOUT_FILENO);
        close(in_pipe[0]);
        close(in_pipe[1]);
        close(out_pipe[0]);
        close(out_pipe[1]);
        std::vector<char*> args;
        args.reserve(argv.size() + 1);
        for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
        args.push_back(nullptr);
        execvp(args[0], args.data());
        _exit(127);
    }

    close(in_pipe[0]);
    close(out_pipe[1]);

    size_t written = 0;
    while (written < input.size()) {
        ssize_t n = write(in_pipe[1], input.data() + written, input.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            break;  // child closed stdin early; not fatal
        }
        written += static_cast<size_t>(n);
    }
    close(in_pipe[1]);

    ChildResult result;
    char buf[4096];
    for (;;) {
        ssize_t n = read(out_pipe[0], buf, sizeof(buf));
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) break;
        result.stdout_text.append(buf, static_cast<size_t>(n));
    }
    close(out_pipe[0]);

    int status = 0;
    if (waitpid(pid, &status, 0) < 0)
        throw MeasurementError(std::string("waitpid: ") + std::strerror(errno));
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

}  // namespace

SubprocessRunner::SubprocessRunner(std::vector<std::string> command)
    : command_(std::move(command)) {
    if (command_.empty()) throw MeasurementError("runner command is empty");
}

RunOutcome SubprocessRunner::run(const std::string& program, const std::string& language,
                                 const TestCase& test, const RunLimits& limits) {
    // The program goes through a file; runners take a path, not program text.
    const auto dir = std::filesystem::temp_directory_path() / "skillopt-run";
    std::filesystem::create_directories(dir);
    const auto program_path =
        dir / ("prog-" + util::fnv1a64_hex(program) + "-" + std::to_string(getpid()));
    util::write_file(program_path, program);

    std::vector<std::string> argv = command_;
    argv.push_back(program_path.string());
    argv.push_back(language);
    argv.push_back(std::to_string(limits.wall_ms));

    ChildResult child = run_child(argv, test.input);
    std::filesystem::remove(program_path);

    if (child.exit_code == 127) throw MeasurementError("runner command not found: " + command_[0]);

    // Split off the trailing structured line.
    auto lines = util::split_lines(child.stdout_text);
    int structured = -1;
    for (int i = static_cast<int>(lines.size()) - 1; i >= 0; --i) {
        if (lines[i].rfind("RUNNER:", 0) == 0) {
            structured = i;
            break;
        }
        if (!util::trim(lines[i]).empty()) break;  // last non-empty line must be the result line
    }
    if (structured < 0)
        throw MeasurementError("runner produced no structured result line (exit " +
                               std::to_string(child.exit_code) + ")");

    std::string verdict_text;
    double wall_ms = -1.0;
    for (const auto& token : util::split_list(lines[structured].substr(7), ' ')) {
        if (token.rfind("verdict=", 0) == 0) verdict_text = token.substr(8);
        if (token.rfind("wall_ms=", 0) == 0) wall_ms = std::stod(token.substr(8));
    }
    if (verdict_text.empty() || wall_ms < 0.0)
        throw MeasurementError("malformed runner result line: " + lines[structured]);

    RunOutcome outcome;
    outcome.wall_ms = wall_ms;
    if (verdict_text == "timeout") {
        outcome.verdict = Verdict::Timeout;
        return outcome;
    }
    if (verdict_text != "ok") {
        outcome.verdict = Verdict::ErrorVerdict;
        return outcome;
    }

    std::string produced;
    for (int i = 0; i < structured; ++i) {
        produced += lines[i];
        produced.push_back('\n');
    }
    outcome.verdict = util::normalize_output(produced) == util::normalize_output(test.expected)
                          ? Verdict::Pass
                          : Verdict::Fail;
    return outcome;
}

}  // namespace skillopt
