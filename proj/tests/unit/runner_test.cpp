// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 skillopt contributors

#include "skillopt/runner.hpp"

#include <doctest.h>

#include "skillopt/errors.hpp"
#include "test_support.hpp"

using namespace skillopt;

namespace {
const std::string kStubRunner = SKILLOPT_STUB_RUNNER;
}

TEST_CASE("subprocess runner round-trips the stub protocol") {
    SubprocessRunner runner({kStubRunner});
    RunLimits limits;

    SUBCASE("echo stub passes and reports its wall time") {
        const auto outcome =
            runner.run("#stub\nmode echo\nwall_ms 12.5\n", "python", {"hello\n", "hello\n"}, limits);
        CHECK(outcome.verdict == Verdict::Pass);
        CHECK(outcome.wall_ms == doctest::Approx(12.5));
    }

    SUBCASE("trailing whitespace is normalized before comparison") {
        const auto outcome = runner.run("#stub\nout hello\nwall_ms 1\n", "python",
                                        {"ignored", "hello   \n\n"}, limits);
        CHECK(outcome.verdict == Verdict::Pass);
    }

    SUBCASE("wrong output is a Fail verdict, not an error") {
        const auto outcome =
            runner.run("#stub\nout nope\nwall_ms 1\n", "python", {"x", "expected"}, limits);
        CHECK(outcome.verdict == Verdict::Fail);
    }

    SUBCASE("a declared runtime over the limit is a timeout") {
        limits.wall_ms = 100.0;
        const auto outcome =
            runner.run("#stub\nmode echo\nwall_ms 5000\n", "python", {"x", "x"}, limits);
        CHECK(outcome.verdict == Verdict::Timeout);
    }

    SUBCASE("a non-stub program is an error verdict") {
        const auto outcome = runner.run("print('real code')\n", "python", {"x", "x"}, limits);
        CHECK(outcome.verdict == Verdict::ErrorVerdict);
    }
}

TEST_CASE("a missing runner command is an infrastructure failure") {
    SubprocessRunner runner({"/nonexistent/runner-binary"});
    CHECK_THROWS_AS(runner.run("#stub\nmode echo\nwall_ms 1\n", "python", {"x", "x"}, {}),
                    MeasurementError);
}
