// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 skillopt contributors

// Reference implementation of the external runner contract, used by the test
// suite and usable as a template for real runners. It does not execute
// anything: the "program" is a stub script declaring its own behavior.
//
//   #stub
//   mode echo          # output = the test input
//   out <line>         # or: fixed output, one line per directive
//   wall_ms <float>    # declared wall time
//   verdict ok|timeout|error   (default ok)
//
// Invocation: skillopt-stub-runner <program_path> <language> <wall_limit_ms>
// Test input arrives on stdin; the program output is printed followed by the
// structured result line the harness parses.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    if (argc < 4) {
        std::cerr << "usage: skillopt-stub-runner <program> <language> <wall_limit_ms>\n";
        return 2;
    }
    const std::string program_path = argv[1];
    const double wall_limit_ms = std::stod(argv[3]);

    std::ostringstream stdin_text;
    stdin_text << std::cin.rdbuf();

    std::ifstream program(program_path);
    if (!program) {
        std::cout << "RUNNER: verdict=error wall_ms=0\n";
        return 0;
    }

    std::string line;
    bool is_stub = false;
    bool echo = false;
    double wall_ms = 1.0;
    std::string verdict = "ok";
    std::vector<std::string> const_output;

    bool first = true;
    while (std::getline(program, line)) {
        if (first) {
            first = false;
            if (line.rfind("#stub", 0) == 0) {
                is_stub = true;
                continue;
            }
            break;
        }
        if (line.rfind("mode echo", 0) == 0) {
            echo = true;
        } else if (line.rfind("out ", 0) == 0) {
            const_output.push_back(line.substr(4));
        } else if (line.rfind("out", 0) == 0 && line.size() == 3) {
            const_output.push_back("");
        } else if (line.rfind("wall_ms ", 0) == 0) {
            wall_ms = std::stod(line.substr(8));
        } else if (line.rfind("verdict ", 0) == 0) {
            verdict = line.substr(8);
        }
    }

    if (!is_stub) {
        std::cout << "RUNNER: verdict=error wall_ms=0\n";
        return 0;
    }
    if (verdict == "ok" && wall_ms > wall_limit_ms) verdict = "timeout";

    if (verdict == "ok") {
        if (echo)
            std::cout << stdin_text.str();
        else
            for (const auto& out : const_output) std::cout << out << "\n";
    }
    std::cout << "RUNNER: verdict=" << verdict << " wall_ms=" << wall_ms << "\n";
    return 0;
}
