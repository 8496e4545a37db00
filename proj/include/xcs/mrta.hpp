#pragma once

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "xcs/operators.hpp"
#include "xcs/process.hpp"

namespace xcs {

struct Vec2 {
    double x = 0;
    double y = 0;
};

inline double distance(const Vec2& a, const Vec2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

// A goal with target coordinates. The process key embeds the target so that
// robots discovering the task from neighbour messages can score it without
// ever having seen the goal record.
struct Task {
    std::string id;
    Vec2 target;
    double arrival_time = 0;

    Literal key() const {
        return Literal::tuple({Literal(id), Literal(target.x), Literal(target.y)});
    }

    static Task from_key(const Literal& k) {
        Task t;
        t.id = k.at(0).as_str();
        t.target = {k.at(1).as_real(), k.at(2).as_real()};
        return t;
    }

    bool valid() const { return !id.empty() && std::isfinite(target.x) && std::isfinite(target.y); }
};

enum class AvailKind : std::uint8_t { Idle, Busy, Failed };

// Execution feedback for the currently assigned task, refreshed by the
// caller (simulator or feedback file) before every round.
enum class TaskExec : std::uint8_t { None, Navigating, Arrived, Failed };

enum class FailReason : std::uint8_t {
    None,
    NavigationFailure,
    Lifted,
    CriticalBattery,
    BatteryOverheat,
    Killed,
};

struct RobotState {
    DeviceId id = 0;
    Vec2 pos;
    double heading = 0;
    double battery = 1.0;
    AvailKind avail = AvailKind::Idle;
    Literal busy_key;  // meaningful only when avail == Busy
    std::set<Literal> failed_tasks;
    bool hard_failed = false;
    TaskExec exec = TaskExec::None;

    bool busy_on(const Literal& key) const { return avail == AvailKind::Busy && busy_key == key; }
};

struct DiameterBound {
    bool dynamic = true;
    std::int64_t value = 8;  // used when not dynamic

    static DiameterBound fixed(std::int64_t v) { return {false, v}; }
};

struct MrtaConfig {
    DiameterBound delta;
    std::int64_t theta = 3;       // consecutive stable rounds before claiming
    double omega = 20.0;          // % cost improvement required to preempt
    bool preemptive = false;
    double round_period = 0.2;    // seconds
    double retention = 2.0;       // seconds a neighbour message stays usable
    std::int64_t diameter_cap = 16;
    std::int64_t diameter_floor = 2;
    double arrival_eps = 0.2;     // meters; task completes within this radius
    double critical_battery = 0.05;

    int claim_ttl_rounds() const {
        int r = static_cast<int>(std::ceil(retention / round_period));
        return r < 1 ? 1 : r;
    }
    int grace_rounds() const { return 2 * claim_ttl_rounds(); }
};

// Cost of assigning `task` to `robot`: straight-line distance to the target
// scaled by how depleted the battery is. Infinite while the robot is busy
// with another task, has failed this task, or is out of service entirely.
inline double task_cost(const RobotState& robot, const Task& task) {
    if (robot.hard_failed || robot.avail == AvailKind::Failed) return INFINITY;
    if (robot.failed_tasks.count(task.key())) return INFINITY;
    if (robot.avail == AvailKind::Busy && robot.busy_key != task.key()) return INFINITY;
    double charge = robot.battery < 0 ? 0 : (robot.battery > 1 ? 1 : robot.battery);
    return distance(robot.pos, task.target) * (1.0 - charge);
}

// Marks the robot as unable to complete work and releases the current task
// if any. Navigation failures are task-specific: the robot returns to the
// pool for other tasks. The remaining reasons take the robot out of service.
// Peers find out because the robot's election cost turns infinite in its
// next exports.
inline void failure_notice(RobotState& s, FailReason reason) {
    if (reason == FailReason::None) return;
    if (s.avail == AvailKind::Busy) {
        s.failed_tasks.insert(s.busy_key);
        s.avail = AvailKind::Idle;
        s.busy_key = {};
    }
    if (reason != FailReason::NavigationFailure) {
        s.hard_failed = true;
        s.avail = AvailKind::Failed;
    }
}

// Per-task outcome of one round, for callers that track metrics.
struct TaskReport {
    double cost = INFINITY;
    DeviceId holder = kNoDevice;       // current election winner
    bool holder_stable = false;
    DeviceId claimant = kNoDevice;     // freshest observed assignee, if any
    int observed_claimants = 0;        // distinct assignees visible this round
    bool claimed = false;
    bool preempted = false;
    bool halted = false;               // released after losing a conflict
    bool completed = false;
    bool failed = false;
};

namespace detail {

struct ClaimView {
    DeviceId claimant = kNoDevice;
    std::int64_t age = 0;
    double cost = 0;

    Literal to_literal() const {
        return Literal::tuple({Literal::device(claimant), Literal(age), Literal(cost)});
    }
    static ClaimView from_literal(const Literal& l) {
        return {l.at(0).as_device(), l.at(1).as_int(), l.at(2).as_real()};
    }
    bool none() const { return claimant == kNoDevice; }
};

// Freshness order for claim gossip: lower age wins, then lower cost, then
// lower claimant id.
inline bool fresher(const ClaimView& a, const ClaimView& b) {
    if (a.age != b.age) return a.age < b.age;
    if (a.cost != b.cost) return a.cost < b.cost;
    return a.claimant < b.claimant;
}

}  // namespace detail

// Conflict rule for multiple observed assignees of one task: the claimant
// with the lowest current cost keeps it, ties broken by lower device id.
// Returns the keeper.
inline DeviceId resolve_conflict(const std::map<DeviceId, double>& claimants) {
    DeviceId keep = kNoDevice;
    double best = INFINITY;
    for (const auto& [id, cost] : claimants) {
        if (keep == kNoDevice || cost < best || (cost == best && id < keep)) {
            keep = id;
            best = cost;
        }
    }
    return keep;
}

// One round of the per-task collective computation: score the task, elect
// the best (cost, id) pair, claim it after theta stable rounds when
// unassigned (or when preemption improves the cost by at least omega
// percent), gossip the assignee, resolve conflicts, and terminate the
// process when execution finishes.
inline ProcessOutput task_processing(Round& r, const Literal& key, RobotState& state,
                                     const MrtaConfig& cfg, std::int64_t delta,
                                     TaskReport& report) {
    using detail::ClaimView;

    const DeviceId me = r.self();
    const Task task = Task::from_key(key);
    const double cost = task_cost(state, task);
    report.cost = cost;

    Literal elected = diameter_election(r, Literal::pair(Literal(cost), Literal::device(me)), delta);
    const DeviceId holder = elected.second().as_device();
    const bool holder_stable = stable_for(r, elected.second(), cfg.theta);
    report.holder = holder;
    report.holder_stable = holder_stable;

    const std::int64_t ttl = cfg.claim_ttl_rounds();
    const ClaimView no_claim{};

    NValue out = r.exchange(NValue(no_claim.to_literal()), [&](const NValue& w) {
        const bool busy_here = state.busy_on(key);

        // Gather aged claim views from neighbours and from our own previous
        // round; drop expired ones and stale echoes of our own claim.
        std::vector<ClaimView> views;
        std::set<DeviceId> seen_claimants;
        auto consider = [&](const Literal& l) {
            ClaimView v = ClaimView::from_literal(l);
            if (v.none()) return;
            v.age += 1;
            if (v.age > ttl) return;
            if (v.claimant == me && !busy_here) return;
            views.push_back(v);
            seen_claimants.insert(v.claimant);
        };
        for (const auto& [d, l] : w.entries()) {
            if (d == me) continue;
            consider(l);
        }
        consider(w.get(me));

        if (busy_here) seen_claimants.insert(me);
        report.observed_claimants = static_cast<int>(seen_claimants.size());

        ClaimView best{};
        for (const auto& v : views)
            if (best.none() || detail::fresher(v, best)) best = v;

        ClaimView send = best;

        if (busy_here) {
            if (state.exec == TaskExec::Failed) {
                failure_notice(state, FailReason::NavigationFailure);
                state.exec = TaskExec::None;
                report.failed = true;
            } else if (state.exec == TaskExec::Arrived) {
                state.avail = AvailKind::Idle;
                state.busy_key = {};
                state.exec = TaskExec::None;
                report.completed = true;
                send = no_claim;
            } else {
                // Conflict check: yield to a rival assignee with a better
                // (cost, id) pair, otherwise keep broadcasting our claim.
                bool yield = false;
                for (const auto& v : views) {
                    if (v.claimant == me) continue;
                    if (v.cost < cost || (v.cost == cost && v.claimant < me)) {
                        yield = true;
                        send = v;
                        break;
                    }
                }
                if (yield) {
                    state.avail = AvailKind::Idle;
                    state.busy_key = {};
                    report.halted = true;
                } else {
                    send = ClaimView{me, 0, cost};
                }
            }
        } else {
            const bool assigned = !best.none();
            const bool can_claim = std::isfinite(cost) && state.avail == AvailKind::Idle;
            if (holder_stable && holder == me && can_claim) {
                if (!assigned) {
                    state.avail = AvailKind::Busy;
                    state.busy_key = key;
                    report.claimed = true;
                    send = ClaimView{me, 0, cost};
                } else if (cfg.preemptive && cost <= (1.0 - cfg.omega / 100.0) * best.cost) {
                    state.avail = AvailKind::Busy;
                    state.busy_key = key;
                    report.claimed = true;
                    report.preempted = true;
                    send = ClaimView{me, 0, cost};
                }
            }
        }

        report.claimant = state.busy_on(key) ? me : (send.none() ? kNoDevice : send.claimant);
        return retsend(NValue(send.to_literal()));
    });

    Literal view_out = out.get(me);
    if (report.completed) return terminate_process(view_out);
    return {view_out, ProcessStatus::Active};
}

struct Actuation {
    enum class Cmd : std::uint8_t { Stop, Goto } cmd = Cmd::Stop;
    Vec2 target;
    Literal task;
};

struct MrtaResult {
    RobotState state;
    Actuation act;
    Export exp;
    std::map<Literal, TaskReport> tasks;
    std::int64_t diameter = 0;
    int rejected_arrivals = 0;
};

// Lists the process keys present in an export together with their status
// entries (Active computations and Terminating tombstones alike).
inline std::map<Literal, ProcessStatus> exported_keys(const Export& exp) {
    std::map<Literal, ProcessStatus> keys;
    for (const auto& [path, nv] : exp) {
        if (path.size() == 2 && path[0].tag == PathToken::Tag::Spawn &&
            path[1].tag == PathToken::Tag::Key)
            keys[path[1].key] = static_cast<ProcessStatus>(nv.dflt().first().as_int());
    }
    return keys;
}

// One full device round: refresh the diameter bound, feed new goals into the
// process pool, run every live task process, and derive the actuation
// command. Pure in the network sense: everything a peer can observe is in
// the returned export.
inline MrtaResult mrta_round(const RoundContext& ctx, RobotState state,
                             const std::vector<Task>& arrivals, const MrtaConfig& cfg) {
    Round r(ctx);
    MrtaResult res;

    std::int64_t delta = cfg.delta.dynamic
                             ? estimate_diameter(r, cfg.diameter_cap, cfg.diameter_floor)
                             : cfg.delta.value;
    res.diameter = delta;

    std::set<Literal> gen;
    for (const auto& t : arrivals) {
        if (!t.valid()) {
            res.rejected_arrivals += 1;
            continue;
        }
        gen.insert(t.key());
    }

    ProcessConfig pc;
    pc.grace_rounds = cfg.grace_rounds();
    auto outputs = spawn(
        r, gen,
        [&](Round& rr, const Literal& key) {
            return task_processing(rr, key, state, cfg, delta, res.tasks[key]);
        },
        pc);

    // Our process may have been tombstoned by a peer's termination or
    // collected outright; in that case the task is gone and we stop.
    if (state.avail == AvailKind::Busy && !outputs.count(state.busy_key)) {
        state.avail = AvailKind::Idle;
        state.busy_key = {};
    }

    if (state.avail == AvailKind::Busy) {
        res.act.cmd = Actuation::Cmd::Goto;
        res.act.target = Task::from_key(state.busy_key).target;
        res.act.task = state.busy_key;
    }

    res.state = std::move(state);
    res.exp = r.take_export();
    return res;
}

}  // namespace xcs
