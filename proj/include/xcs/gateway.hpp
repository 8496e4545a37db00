#pragma once

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "xcs/mrta.hpp"

namespace xcs {

// File-drop protocol between the decision layer and the robot controller:
// goals in, actions out, feedback in. One comma-separated record per line,
// UTF-8, newline-terminated. Writers replace files atomically so a
// concurrent reader sees either the old or the new content, never a mix.

struct GoalRecord {
    std::string task_id;
    double x = 0;
    double y = 0;
};

struct ActionRecord {
    DeviceId robot = 0;
    enum class Cmd : std::uint8_t { Goto, Stop } cmd = Cmd::Stop;
    double x = 0;
    double y = 0;
    std::string task_id;
};

struct FeedbackRecord {
    DeviceId robot = 0;
    double x = 0;
    double y = 0;
    double heading = 0;
    enum class TaskStatus : std::uint8_t { None, Navigating, Succeeded, Failed } task =
        TaskStatus::None;
    enum class SystemStatus : std::uint8_t { Ok, Fault } system = SystemStatus::Ok;
    std::string fault_reason;
    double battery = 1.0;
};

namespace csv {

inline std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline std::optional<double> to_double(const std::string& s) {
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

inline std::optional<long> to_long(const std::string& s) {
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    long v = std::strtol(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size()) return std::nullopt;
    return v;
}

// %.17g keeps round-trips exact; a bare integer gets a ".0" so coordinates
// always look like decimals.
inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s = buf;
    if (s.find_first_of(".einf") == std::string::npos) s += ".0";
    return s;
}

}  // namespace csv

// Write-temp-then-rename; the rename is atomic within one filesystem.
inline bool atomic_write_file(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) return false;
        out << content;
        if (!out.flush()) return false;
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        return false;
    }
    return true;
}

inline std::optional<GoalRecord> parse_goal(const std::string& line) {
    auto f = csv::split(line);
    if (f.size() < 3) return std::nullopt;
    auto x = csv::to_double(f[1]);
    auto y = csv::to_double(f[2]);
    if (f[0].empty() || !x || !y) return std::nullopt;
    return GoalRecord{f[0], *x, *y};
}

// Parses every well-formed goal record in `source`; malformed lines are
// skipped and reported through `diagnostics`. An unreadable source yields an
// empty set plus a diagnostic rather than an error.
inline std::vector<GoalRecord> read_goals(const std::string& source,
                                          std::vector<std::string>* diagnostics = nullptr) {
    std::vector<GoalRecord> out;
    std::ifstream in(source);
    if (!in) {
        if (diagnostics) diagnostics->push_back(source + ": unreadable");
        return out;
    }
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (auto g = parse_goal(line)) {
            out.push_back(*g);
        } else if (diagnostics) {
            diagnostics->push_back(source + ":" + std::to_string(lineno) + ": bad goal record: " + line);
        }
    }
    return out;
}

inline std::string format_action(const ActionRecord& a) {
    std::string cmd = a.cmd == ActionRecord::Cmd::Goto ? "goto" : "stop";
    std::string xy = a.cmd == ActionRecord::Cmd::Goto ? csv::num(a.x) + "," + csv::num(a.y) : ",";
    return std::to_string(a.robot) + "," + cmd + "," + xy + "," + a.task_id + "\n";
}

inline std::optional<ActionRecord> parse_action(const std::string& line) {
    auto f = csv::split(line);
    if (f.size() < 5) return std::nullopt;
    auto robot = csv::to_long(f[0]);
    if (!robot || *robot < 0) return std::nullopt;
    ActionRecord a;
    a.robot = static_cast<DeviceId>(*robot);
    a.task_id = f[4];
    if (f[1] == "goto") {
        auto x = csv::to_double(f[2]);
        auto y = csv::to_double(f[3]);
        if (!x || !y) return std::nullopt;
        a.cmd = ActionRecord::Cmd::Goto;
        a.x = *x;
        a.y = *y;
    } else if (f[1] == "stop") {
        a.cmd = ActionRecord::Cmd::Stop;
    } else {
        return std::nullopt;
    }
    return a;
}

inline bool write_action(const std::string& path, const ActionRecord& a) {
    return atomic_write_file(path, format_action(a));
}

inline std::string task_status_name(FeedbackRecord::TaskStatus s) {
    switch (s) {
        case FeedbackRecord::TaskStatus::None: return "none";
        case FeedbackRecord::TaskStatus::Navigating: return "navigating";
        case FeedbackRecord::TaskStatus::Succeeded: return "succeeded";
        case FeedbackRecord::TaskStatus::Failed: return "failed";
    }
    return "none";
}

inline std::string format_feedback(const FeedbackRecord& fb) {
    std::string sys = fb.system == FeedbackRecord::SystemStatus::Ok
                          ? "ok"
                          : (fb.fault_reason.empty() ? "fault" : "fault:" + fb.fault_reason);
    return std::to_string(fb.robot) + "," + csv::num(fb.x) + "," + csv::num(fb.y) + "," +
           csv::num(fb.heading) + "," + task_status_name(fb.task) + "," + sys + "," +
           csv::num(fb.battery) + "\n";
}

// Tolerant of extra trailing fields so controllers can append telemetry.
inline std::optional<FeedbackRecord> parse_feedback(const std::string& line) {
    auto f = csv::split(line);
    if (f.size() < 7) return std::nullopt;
    auto robot = csv::to_long(f[0]);
    auto x = csv::to_double(f[1]);
    auto y = csv::to_double(f[2]);
    auto h = csv::to_double(f[3]);
    auto battery = csv::to_double(f[6]);
    if (!robot || *robot < 0 || !x || !y || !h || !battery) return std::nullopt;
    if (*battery < 0 || *battery > 1) return std::nullopt;

    FeedbackRecord fb;
    fb.robot = static_cast<DeviceId>(*robot);
    fb.x = *x;
    fb.y = *y;
    fb.heading = *h;
    fb.battery = *battery;

    if (f[4] == "none") fb.task = FeedbackRecord::TaskStatus::None;
    else if (f[4] == "navigating") fb.task = FeedbackRecord::TaskStatus::Navigating;
    else if (f[4] == "succeeded") fb.task = FeedbackRecord::TaskStatus::Succeeded;
    else if (f[4] == "failed") fb.task = FeedbackRecord::TaskStatus::Failed;
    else return std::nullopt;

    if (f[5] == "ok") {
        fb.system = FeedbackRecord::SystemStatus::Ok;
    } else if (f[5] == "fault" || f[5].rfind("fault:", 0) == 0) {
        fb.system = FeedbackRecord::SystemStatus::Fault;
        if (f[5].size() > 6) fb.fault_reason = f[5].substr(6);
    } else {
        return std::nullopt;
    }
    return fb;
}

inline bool write_feedback(const std::string& path, const FeedbackRecord& fb) {
    return atomic_write_file(path, format_feedback(fb));
}

inline std::optional<FeedbackRecord> read_feedback(const std::string& source) {
    std::ifstream in(source);
    if (!in) return std::nullopt;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        return parse_feedback(line);
    }
    return std::nullopt;
}

inline FailReason fault_reason_from_string(const std::string& s) {
    if (s == "navigation" || s == "navigation-failure") return FailReason::NavigationFailure;
    if (s == "lifted") return FailReason::Lifted;
    if (s == "critical-battery" || s == "battery") return FailReason::CriticalBattery;
    if (s == "battery-overheat" || s == "overheat") return FailReason::BatteryOverheat;
    if (s == "killed") return FailReason::Killed;
    return FailReason::NavigationFailure;
}

}  // namespace xcs
