#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "xcs/gateway.hpp"
#include "xcs/mrta.hpp"

namespace xcs {

struct RobotSpec {
    DeviceId id = 0;
    Vec2 pos;
    double heading = 0;
    double battery = 1.0;
    double speed = -1;  // <0: use the scenario default
};

struct TaskSpec {
    double time = 0;
    Task task;
    DeviceId to = kNoDevice;  // kNoDevice: delivered to every robot
};

struct FaultSpec {
    enum class Kind : std::uint8_t { DrainBattery, SetCommRadius, KillRobot, LiftRobot };
    double time = 0;
    Kind kind = Kind::DrainBattery;
    DeviceId robot = 0;
    double value = 0;
};

// Declarative simulation input. Sections: [arena], [config], [robots],
// [tasks], [faults]; '#' starts a comment. The schema is documented in the
// README next to the bundled scenarios.
struct Scenario {
    double arena_w = 3.5;
    double arena_h = 6.0;
    double comm_radius = 5.0;
    double duration = 120.0;
    double min_time = 1.0;   // keep stepping at least this long
    double speed = 0.3;      // default robot speed, m/s
    double drain_per_meter = 0.01;
    double drain_per_round = 0.0005;
    double jitter = 0.1;     // +-fraction of the round period
    std::uint64_t seed = 1;
    MrtaConfig cfg;
    std::vector<RobotSpec> robots;
    std::vector<TaskSpec> tasks;
    std::vector<FaultSpec> faults;

    std::vector<std::string> validate() const {
        std::vector<std::string> errs;
        if (robots.empty()) errs.push_back("no robots defined");
        if (comm_radius <= 0) errs.push_back("comm radius must be positive");
        if (cfg.theta < 1) errs.push_back("theta must be >= 1");
        if (cfg.preemptive && cfg.omega <= 0) errs.push_back("omega must be positive in preemptive mode");
        if (cfg.round_period <= 0) errs.push_back("round period must be positive");
        std::map<DeviceId, int> seen;
        for (const auto& r : robots) {
            if (++seen[r.id] == 2) errs.push_back("duplicate robot id " + std::to_string(r.id));
            if (r.battery < 0 || r.battery > 1)
                errs.push_back("robot " + std::to_string(r.id) + ": battery outside [0,1]");
        }
        for (const auto& t : tasks) {
            if (t.time < 0) errs.push_back("task " + t.task.id + ": negative arrival time");
            if (!t.task.valid()) errs.push_back("task " + t.task.id + ": invalid record");
            if (t.task.target.x < 0 || t.task.target.x > arena_w || t.task.target.y < 0 ||
                t.task.target.y > arena_h)
                errs.push_back("task " + t.task.id + ": target outside the arena");
            if (t.to != kNoDevice && !seen.count(t.to))
                errs.push_back("task " + t.task.id + ": unknown robot " + std::to_string(t.to));
        }
        for (const auto& f : faults)
            if (f.time < 0) errs.push_back("fault at negative time");
        return errs;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return {};
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

}  // namespace detail

// Parses a scenario file. On failure returns std::nullopt and fills
// `errors` with line-tagged diagnostics.
inline std::optional<Scenario> parse_scenario(std::istream& in, std::vector<std::string>& errors,
                                              const std::string& name = "scenario") {
    Scenario sc;
    std::string section;
    std::string line;
    int lineno = 0;

    auto err = [&](const std::string& msg) {
        errors.push_back(name + ":" + std::to_string(lineno) + ": " + msg);
    };

    auto fields = [&](const std::string& s) {
        std::vector<std::string> out;
        for (auto& f : csv::split(s)) out.push_back(detail::trim(f));
        return out;
    };

    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        if (line.front() == '[' && line.back() == ']') {
            section = line.substr(1, line.size() - 2);
            if (section != "arena" && section != "config" && section != "robots" &&
                section != "tasks" && section != "faults")
                err("unknown section [" + section + "]");
            continue;
        }

        if (section == "arena" || section == "config") {
            auto eq = line.find('=');
            if (eq == std::string::npos) {
                err("expected key = value");
                continue;
            }
            std::string key = detail::trim(line.substr(0, eq));
            std::string val = detail::trim(line.substr(eq + 1));
            auto num = csv::to_double(val);
            bool ok = true;
            if (key == "width") ok = num && (sc.arena_w = *num, true);
            else if (key == "height") ok = num && (sc.arena_h = *num, true);
            else if (key == "radius") ok = num && (sc.comm_radius = *num, true);
            else if (key == "duration") ok = num && (sc.duration = *num, true);
            else if (key == "min_time") ok = num && (sc.min_time = *num, true);
            else if (key == "speed") ok = num && (sc.speed = *num, true);
            else if (key == "drain_per_meter") ok = num && (sc.drain_per_meter = *num, true);
            else if (key == "drain_per_round") ok = num && (sc.drain_per_round = *num, true);
            else if (key == "jitter") ok = num && (sc.jitter = *num, true);
            else if (key == "seed") ok = num && (sc.seed = static_cast<std::uint64_t>(*num), true);
            else if (key == "round_period") ok = num && (sc.cfg.round_period = *num, true);
            else if (key == "retention") ok = num && (sc.cfg.retention = *num, true);
            else if (key == "theta") ok = num && (sc.cfg.theta = static_cast<std::int64_t>(*num), true);
            else if (key == "omega") ok = num && (sc.cfg.omega = *num, true);
            else if (key == "arrival_eps") ok = num && (sc.cfg.arrival_eps = *num, true);
            else if (key == "critical_battery") ok = num && (sc.cfg.critical_battery = *num, true);
            else if (key == "diameter_cap") ok = num && (sc.cfg.diameter_cap = static_cast<std::int64_t>(*num), true);
            else if (key == "preemptive") sc.cfg.preemptive = (val == "true" || val == "1");
            else if (key == "diameter") {
                if (val == "dynamic") sc.cfg.delta = DiameterBound{};
                else if (num) sc.cfg.delta = DiameterBound::fixed(static_cast<std::int64_t>(*num));
                else ok = false;
            } else err("unknown key '" + key + "'");
            if (!ok) err("bad value for '" + key + "'");
        } else if (section == "robots") {
            auto f = fields(line);
            if (f.size() < 5) {
                err("robot row needs: id, x, y, heading, battery [, speed]");
                continue;
            }
            auto id = csv::to_long(f[0]);
            auto x = csv::to_double(f[1]), y = csv::to_double(f[2]);
            auto h = csv::to_double(f[3]), b = csv::to_double(f[4]);
            if (!id || *id < 0 || !x || !y || !h || !b) {
                err("bad robot row: " + line);
                continue;
            }
            RobotSpec r;
            r.id = static_cast<DeviceId>(*id);
            r.pos = {*x, *y};
            r.heading = *h;
            r.battery = *b;
            if (f.size() > 5 && !f[5].empty()) {
                auto sp = csv::to_double(f[5]);
                if (!sp) {
                    err("bad robot speed: " + f[5]);
                    continue;
                }
                r.speed = *sp;
            }
            sc.robots.push_back(r);
        } else if (section == "tasks") {
            auto f = fields(line);
            if (f.size() < 4) {
                err("task row needs: time, id, x, y [, robot]");
                continue;
            }
            auto t = csv::to_double(f[0]);
            auto x = csv::to_double(f[2]), y = csv::to_double(f[3]);
            if (!t || f[1].empty() || !x || !y) {
                err("bad task row: " + line);
                continue;
            }
            TaskSpec ts;
            ts.time = *t;
            ts.task = Task{f[1], {*x, *y}, *t};
            if (f.size() > 4 && !f[4].empty()) {
                auto id = csv::to_long(f[4]);
                if (!id || *id < 0) {
                    err("bad task robot: " + f[4]);
                    continue;
                }
                ts.to = static_cast<DeviceId>(*id);
            }
            sc.tasks.push_back(ts);
        } else if (section == "faults") {
            auto f = fields(line);
            if (f.size() < 3) {
                err("fault row needs: time, kind, arg");
                continue;
            }
            auto t = csv::to_double(f[0]);
            auto arg = csv::to_double(f[2]);
            if (!t || !arg) {
                err("bad fault row: " + line);
                continue;
            }
            FaultSpec fs;
            fs.time = *t;
            if (f[1] == "drain_battery") {
                fs.kind = FaultSpec::Kind::DrainBattery;
                fs.robot = static_cast<DeviceId>(*arg);
            } else if (f[1] == "set_radius") {
                fs.kind = FaultSpec::Kind::SetCommRadius;
                fs.value = *arg;
            } else if (f[1] == "kill") {
                fs.kind = FaultSpec::Kind::KillRobot;
                fs.robot = static_cast<DeviceId>(*arg);
            } else if (f[1] == "lift") {
                fs.kind = FaultSpec::Kind::LiftRobot;
                fs.robot = static_cast<DeviceId>(*arg);
            } else {
                err("unknown fault kind '" + f[1] + "'");
                continue;
            }
            sc.faults.push_back(fs);
        } else {
            err("content outside any section");
        }
    }

    for (const auto& e : sc.validate()) errors.push_back(name + ": " + e);
    if (!errors.empty()) return std::nullopt;
    return sc;
}

inline std::optional<Scenario> load_scenario(const std::string& path,
                                             std::vector<std::string>& errors) {
    std::ifstream in(path);
    if (!in) {
        errors.push_back(path + ": cannot open scenario file");
        return std::nullopt;
    }
    return parse_scenario(in, errors, path);
}

}  // namespace xcs
