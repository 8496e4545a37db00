#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "xcs/scenario.hpp"

using namespace xcs;

namespace {

const char* kGood = R"(# demo
[arena]
width = 3.5
height = 6.0

[config]
seed = 7
radius = 5.0
theta = 4
omega = 25
preemptive = true
diameter = dynamic
duration = 30

[robots]
1, 0.5, 0.5, 0.0, 0.9
2, 1.0, 1.0, 0.0, 0.8, 0.4

[tasks]
1.0, T1, 3.0, 5.5, 1
2.0, T2, 1.0, 1.0

[faults]
10.0, set_radius, 3.0
12.0, drain_battery, 2
13.0, kill, 1
14.0, lift, 2
)";

}  // namespace

TEST_CASE("a well-formed scenario parses completely") {
    std::istringstream in(kGood);
    std::vector<std::string> errors;
    auto sc = parse_scenario(in, errors);
    INFO((errors.empty() ? std::string() : errors[0]));
    REQUIRE(errors.empty());
    REQUIRE(sc);
    REQUIRE(sc->arena_w == 3.5);
    REQUIRE(sc->seed == 7);
    REQUIRE(sc->cfg.theta == 4);
    REQUIRE(sc->cfg.preemptive);
    REQUIRE(sc->cfg.delta.dynamic);
    REQUIRE(sc->robots.size() == 2);
    REQUIRE(sc->robots[1].speed == 0.4);
    REQUIRE(sc->tasks.size() == 2);
    REQUIRE(sc->tasks[0].to == 1);
    REQUIRE(sc->tasks[1].to == kNoDevice);  // broadcast
    REQUIRE(sc->faults.size() == 4);
    REQUIRE(sc->faults[0].kind == FaultSpec::Kind::SetCommRadius);
    REQUIRE(sc->faults[0].value == 3.0);
}

TEST_CASE("scenario errors carry line numbers") {
    std::istringstream in("[robots]\n1, 0.5\n");
    std::vector<std::string> errors;
    auto sc = parse_scenario(in, errors, "bad.scenario");
    REQUIRE_FALSE(sc);
    bool line_tagged = false;
    for (const auto& e : errors)
        if (e.find("bad.scenario:2") != std::string::npos) line_tagged = true;
    REQUIRE(line_tagged);
}

TEST_CASE("scenario validation rejects bad parameters") {
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        std::vector<std::string> errors;
        auto sc = parse_scenario(in, errors);
        return std::make_pair(bool(sc), errors);
    };

    auto [ok1, e1] = parse("[config]\ntheta = 0\n[robots]\n1, 0, 0, 0, 0.5\n");
    REQUIRE_FALSE(ok1);

    auto [ok2, e2] = parse("[robots]\n1, 0, 0, 0, 1.5\n");
    REQUIRE_FALSE(ok2);

    auto [ok3, e3] = parse("[robots]\n1, 0, 0, 0, 0.5\n1, 1, 1, 0, 0.5\n");
    REQUIRE_FALSE(ok3);  // duplicate id

    auto [ok4, e4] = parse("[robots]\n1, 0, 0, 0, 0.5\n[tasks]\n1.0, T1, 99.0, 0.5\n");
    REQUIRE_FALSE(ok4);  // target outside the arena

    auto [ok5, e5] = parse("[robots]\n1, 0, 0, 0, 0.5\n[tasks]\n1.0, T1, 1.0, 0.5, 9\n");
    REQUIRE_FALSE(ok5);  // unknown recipient
}

TEST_CASE("unknown sections and keys are reported") {
    std::istringstream in("[weird]\nx = 1\n[config]\nbogus = 2\n[robots]\n1, 0, 0, 0, 0.5\n");
    std::vector<std::string> errors;
    auto sc = parse_scenario(in, errors);
    REQUIRE_FALSE(sc);
    REQUIRE(errors.size() >= 2);
}
