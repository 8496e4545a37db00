#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "xcs/scenario.hpp"
#include "xcs/serialize.hpp"

namespace xcs {

namespace detail {

// Deterministic per-device random stream; the same scenario and seed always
// produce the same schedule regardless of platform.
struct SplitMix64 {
    std::uint64_t s = 0;
    std::uint64_t next() {
        s += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = s;
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

}  // namespace detail

// One device activation, as recorded in the trace.
struct TraceEvent {
    std::size_t idx = 0;
    DeviceId device = 0;
    long round_no = 0;
    double time = 0;
    double x = 0, y = 0;
    double battery = 1.0;
    AvailKind avail = AvailKind::Idle;
    std::string busy_task;                       // empty when idle
    std::vector<std::string> active_keys;        // "id:A" or "id:T"
    std::int64_t diameter = 0;
};

// Message edge e -> e' with the data needed to audit it: the sender/receiver
// distance and radius at send time, and the message age when consumed.
struct TraceEdge {
    std::size_t from = 0;
    std::size_t to = 0;
    double dist = 0;
    double radius = 0;
    double age = 0;
};

struct EventTrace {
    std::vector<TraceEvent> events;
    std::vector<TraceEdge> edges;
};

struct TaskMetrics {
    std::string id;
    double arrival = -1;
    double first_assign = -1;
    double completed = -1;
    std::vector<std::pair<double, DeviceId>> claims;
    int reassignments = 0;
    int conflicts_detected = 0;  // distinct episodes of >= 2 observed assignees
    int conflicts_resolved = 0;  // assignees that halted after losing a conflict
};

struct RunMetrics {
    std::map<std::string, TaskMetrics> tasks;
    long rounds = 0;
    long messages_sent = 0;
    long deliveries = 0;
    int conflicts_detected = 0;
    int conflicts_resolved = 0;
    bool all_completed = false;
    bool timed_out = false;
    double end_time = 0;
    std::vector<std::string> violations;
};

// Global-knowledge assignment oracle: per connected component of the
// proximity graph, each task goes to the robot minimizing (task_cost, id).
// Returns kNoDevice for tasks nobody in their component can take.
inline std::map<std::string, DeviceId> oracle_assign(const std::vector<RobotState>& robots,
                                                     double radius,
                                                     const std::vector<std::pair<Task, DeviceId>>& tasks) {
    std::map<DeviceId, std::size_t> index;
    for (std::size_t i = 0; i < robots.size(); ++i) index[robots[i].id] = i;

    // components by repeated expansion
    std::map<DeviceId, int> comp;
    int next_comp = 0;
    for (const auto& [id, i] : index) {
        if (comp.count(id)) continue;
        std::vector<DeviceId> stack{id};
        comp[id] = next_comp;
        while (!stack.empty()) {
            DeviceId cur = stack.back();
            stack.pop_back();
            for (const auto& [other, j] : index) {
                if (comp.count(other)) continue;
                if (distance(robots[index[cur]].pos, robots[j].pos) <= radius) {
                    comp[other] = next_comp;
                    stack.push_back(other);
                }
            }
        }
        ++next_comp;
    }

    std::map<std::string, DeviceId> out;
    for (const auto& [task, anchor] : tasks) {
        auto it = comp.find(anchor);
        if (it == comp.end()) {
            out[task.id] = kNoDevice;
            continue;
        }
        DeviceId best = kNoDevice;
        double best_cost = INFINITY;
        for (const auto& [id, i] : index) {
            if (comp[id] != it->second) continue;
            double c = task_cost(robots[i], task);
            if (!std::isfinite(c)) continue;
            if (best == kNoDevice || c < best_cost || (c == best_cost && id < best)) {
                best = id;
                best_cost = c;
            }
        }
        out[task.id] = best;
    }
    return out;
}

// Discrete-event network simulator: asynchronous device rounds with seeded
// jitter, proximity-based delivery, straight-line motion, linear battery
// drain, and fault injection. Deterministic for a fixed scenario and seed.
class Simulator {
public:
    explicit Simulator(Scenario sc) : sc_(std::move(sc)), radius_(sc_.comm_radius) {
        std::stable_sort(sc_.faults.begin(), sc_.faults.end(),
                         [](const FaultSpec& a, const FaultSpec& b) { return a.time < b.time; });
        std::stable_sort(sc_.tasks.begin(), sc_.tasks.end(),
                         [](const TaskSpec& a, const TaskSpec& b) { return a.time < b.time; });
        for (const auto& r : sc_.robots) {
            Node n;
            n.spec = r;
            if (n.spec.speed < 0) n.spec.speed = sc_.speed;
            n.state.id = r.id;
            n.state.pos = r.pos;
            n.state.heading = r.heading;
            n.state.battery = r.battery;
            n.rng.s = sc_.seed * 0x9E3779B97F4A7C15ULL + r.id * 0xD1B54A32D192ED03ULL;
            n.next_round = jitter_period(n) * 0.5;  // desynchronized start
            nodes_.emplace(r.id, std::move(n));
        }
        for (const auto& t : sc_.tasks) {
            auto& tm = metrics_.tasks[t.task.id];
            tm.id = t.task.id;
            tm.arrival = t.time;
        }
    }

    // Runs the earliest scheduled device round. Returns false once finished.
    bool step() {
        if (finished_) return false;

        DeviceId who = kNoDevice;
        double when = INFINITY;
        for (const auto& [id, n] : nodes_)
            if (n.alive && n.next_round < when) {
                when = n.next_round;
                who = id;
            }
        if (who == kNoDevice) {
            finish(when);
            return false;
        }
        if (when > sc_.duration) {
            finish(sc_.duration);
            return false;
        }

        apply_faults(when);
        Node& node = nodes_.at(who);
        if (!node.alive) return !check_done(when);

        run_round(node, when);
        return !check_done(when);
    }

    RunMetrics run() {
        while (step()) {
        }
        return metrics_;
    }

    const EventTrace& trace() const { return trace_; }
    const RunMetrics& metrics() const { return metrics_; }
    double now() const { return now_; }
    double comm_radius() const { return radius_; }

    std::vector<RobotState> snapshot() const {
        std::vector<RobotState> out;
        for (const auto& [id, n] : nodes_)
            if (n.alive) out.push_back(n.state);
        return out;
    }

    // Active (uncompleted) tasks with an anchor device for component lookup:
    // the current claimant when one exists, otherwise the first recipient.
    std::vector<std::pair<Task, DeviceId>> active_tasks() const {
        std::vector<std::pair<Task, DeviceId>> out;
        for (const auto& t : sc_.tasks) {
            auto mit = metrics_.tasks.find(t.task.id);
            if (mit != metrics_.tasks.end() && mit->second.completed >= 0) continue;
            DeviceId anchor = t.to != kNoDevice ? t.to : sc_.robots.front().id;
            for (const auto& [id, n] : nodes_)
                if (n.alive && n.state.avail == AvailKind::Busy &&
                    Task::from_key(n.state.busy_key).id == t.task.id)
                    anchor = id;
            out.emplace_back(t.task, anchor);
        }
        return out;
    }

    std::map<std::string, DeviceId> claimants() const {
        std::map<std::string, DeviceId> out;
        for (const auto& [id, n] : nodes_)
            if (n.alive && n.state.avail == AvailKind::Busy)
                out[Task::from_key(n.state.busy_key).id] = id;
        return out;
    }

    // Robots currently busy per task id (more than one means a live conflict).
    std::map<std::string, std::vector<DeviceId>> claimant_sets() const {
        std::map<std::string, std::vector<DeviceId>> out;
        for (const auto& [id, n] : nodes_)
            if (n.alive && n.state.avail == AvailKind::Busy)
                out[Task::from_key(n.state.busy_key).id].push_back(id);
        return out;
    }

    void write_trace(std::ostream& os) const {
        os << "# xcsim trace v1\n";
        for (const auto& e : trace_.events) {
            char buf[256];
            std::snprintf(buf, sizeof buf, "E %zu %u %ld %.6f %.6f %.6f %.6f %c %s",
                          e.idx, e.device, e.round_no, e.time, e.x, e.y, e.battery,
                          e.avail == AvailKind::Idle ? 'I' : (e.avail == AvailKind::Busy ? 'B' : 'F'),
                          e.busy_task.empty() ? "-" : e.busy_task.c_str());
            os << buf;
            for (const auto& k : e.active_keys) os << " " << k;
            os << "\n";
        }
        for (const auto& m : trace_.edges) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "M %zu %zu %.6f %.6f %.6f\n", m.from, m.to, m.dist,
                          m.radius, m.age);
            os << buf;
        }
    }

    void write_metrics(std::ostream& os) const {
        os << "rounds=" << metrics_.rounds << "\n";
        os << "messages_sent=" << metrics_.messages_sent << "\n";
        os << "deliveries=" << metrics_.deliveries << "\n";
        os << "conflicts_detected=" << metrics_.conflicts_detected << "\n";
        os << "conflicts_resolved=" << metrics_.conflicts_resolved << "\n";
        os << "all_completed=" << (metrics_.all_completed ? 1 : 0) << "\n";
        os << "timed_out=" << (metrics_.timed_out ? 1 : 0) << "\n";
        char buf[64];
        std::snprintf(buf, sizeof buf, "end_time=%.6f\n", metrics_.end_time);
        os << buf;
        for (const auto& v : metrics_.violations) os << "violation=" << v << "\n";
        for (const auto& [id, t] : metrics_.tasks) {
            std::snprintf(buf, sizeof buf, " arrival=%.6f first_assign=%.6f completed=%.6f",
                          t.arrival, t.first_assign, t.completed);
            os << "task " << id << buf << " assignments=" << t.claims.size()
               << " reassignments=" << t.reassignments
               << " conflicts=" << t.conflicts_detected
               << " resolved=" << t.conflicts_resolved << " claims=";
            for (std::size_t i = 0; i < t.claims.size(); ++i) {
                if (i) os << "|";
                std::snprintf(buf, sizeof buf, "%u@%.3f", t.claims[i].second, t.claims[i].first);
                os << buf;
            }
            os << "\n";
        }
    }

    // Plot data: time, robot, x, y, status (and per-robot timeline files).
    void write_plot(std::ostream& os) const {
        os << "time,robot,x,y,status,task\n";
        for (const auto& e : trace_.events) {
            char buf[200];
            std::snprintf(buf, sizeof buf, "%.6f,%u,%.6f,%.6f,%c,%s\n", e.time, e.device, e.x, e.y,
                          e.avail == AvailKind::Idle ? 'I' : (e.avail == AvailKind::Busy ? 'B' : 'F'),
                          e.busy_task.empty() ? "-" : e.busy_task.c_str());
            os << buf;
        }
    }

    bool write_outputs(const std::string& dir) const {
        namespace fs = std::filesystem;
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) return false;
        {
            std::ofstream f(dir + "/trace.txt", std::ios::binary);
            if (!f) return false;
            write_trace(f);
        }
        {
            std::ofstream f(dir + "/metrics.txt", std::ios::binary);
            if (!f) return false;
            write_metrics(f);
        }
        {
            std::ofstream f(dir + "/plot.csv", std::ios::binary);
            if (!f) return false;
            write_plot(f);
        }
        for (const auto& [id, n] : nodes_) {
            std::ofstream f(dir + "/timeline_" + std::to_string(id) + ".csv", std::ios::binary);
            if (!f) return false;
            f << "time,x,y,battery,status,task\n";
            for (const auto& e : trace_.events) {
                if (e.device != id) continue;
                char buf[200];
                std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f,%c,%s\n", e.time, e.x, e.y,
                              e.battery,
                              e.avail == AvailKind::Idle ? 'I' : (e.avail == AvailKind::Busy ? 'B' : 'F'),
                              e.busy_task.empty() ? "-" : e.busy_task.c_str());
                f << buf;
            }
        }
        return true;
    }

private:
    struct StoredMsg {
        Export exp;
        double sent = 0;
        std::size_t event_idx = 0;
        double dist = 0;
        double radius = 0;
    };

    struct Node {
        RobotSpec spec;
        RobotState state;
        Export prev_export;
        std::map<DeviceId, StoredMsg> mailbox;
        double next_round = 0;
        double last_round = 0;
        long round_no = 0;
        bool alive = true;
        std::optional<Vec2> goal;
        std::size_t next_task = 0;  // index into sc_.tasks already consumed
        detail::SplitMix64 rng;
    };

    double jitter_period(Node& n) {
        double u = n.rng.unit() * 2.0 - 1.0;  // [-1, 1)
        return sc_.cfg.round_period * (1.0 + sc_.jitter * u);
    }

    void apply_faults(double t) {
        while (fault_idx_ < sc_.faults.size() && sc_.faults[fault_idx_].time <= t) {
            const FaultSpec& f = sc_.faults[fault_idx_++];
            switch (f.kind) {
                case FaultSpec::Kind::SetCommRadius:
                    radius_ = f.value;
                    break;
                case FaultSpec::Kind::DrainBattery:
                    if (auto it = nodes_.find(f.robot); it != nodes_.end())
                        it->second.state.battery = 0.0;
                    break;
                case FaultSpec::Kind::KillRobot:
                    if (auto it = nodes_.find(f.robot); it != nodes_.end())
                        it->second.alive = false;
                    break;
                case FaultSpec::Kind::LiftRobot:
                    if (auto it = nodes_.find(f.robot); it != nodes_.end())
                        failure_notice(it->second.state, FailReason::Lifted);
                    break;
            }
        }
    }

    void run_round(Node& node, double t) {
        now_ = t;
        const double dt = t - node.last_round;

        // Motion toward the current goal, then battery bookkeeping.
        double moved = 0;
        if (node.goal && node.spec.speed > 0 && !node.state.hard_failed) {
            double d = distance(node.state.pos, *node.goal);
            moved = std::min(d, node.spec.speed * dt);
            if (d > 1e-12) {
                node.state.pos.x += (node.goal->x - node.state.pos.x) / d * moved;
                node.state.pos.y += (node.goal->y - node.state.pos.y) / d * moved;
                node.state.heading = std::atan2(node.goal->y - node.state.pos.y,
                                                node.goal->x - node.state.pos.x);
            }
        }
        if (moved > node.spec.speed * dt + 1e-9)
            metrics_.violations.push_back("motion bound exceeded at t=" + std::to_string(t));
        node.state.battery -= sc_.drain_per_meter * moved + sc_.drain_per_round;
        if (node.state.battery < 0) node.state.battery = 0;

        if (node.state.battery <= sc_.cfg.critical_battery && !node.state.hard_failed)
            failure_notice(node.state, FailReason::CriticalBattery);

        // Execution feedback for the assigned task.
        node.state.exec = TaskExec::None;
        if (node.state.avail == AvailKind::Busy) {
            Vec2 target = Task::from_key(node.state.busy_key).target;
            node.state.exec = distance(node.state.pos, target) <= sc_.cfg.arrival_eps
                                  ? TaskExec::Arrived
                                  : TaskExec::Navigating;
        }

        // New goals scheduled for this device.
        std::vector<Task> arrivals;
        while (node.next_task < sc_.tasks.size() && sc_.tasks[node.next_task].time <= t) {
            const TaskSpec& ts = sc_.tasks[node.next_task++];
            if (ts.to == kNoDevice || ts.to == node.spec.id) arrivals.push_back(ts.task);
        }

        // Context from retained mailbox messages.
        RoundContext ctx;
        ctx.self = node.spec.id;
        ctx.prev_self_export = node.prev_export;
        std::size_t this_event = trace_.events.size();
        for (auto it = node.mailbox.begin(); it != node.mailbox.end();) {
            double age = t - it->second.sent;
            if (age > sc_.cfg.retention) {
                it = node.mailbox.erase(it);
                continue;
            }
            ctx.admit(it->first, it->second.exp);
            trace_.edges.push_back({it->second.event_idx, this_event, it->second.dist,
                                    it->second.radius, age});
            ++it;
        }

        MrtaResult res = mrta_round(ctx, node.state, arrivals, sc_.cfg);
        node.state = res.state;
        node.prev_export = std::move(res.exp);
        node.goal = res.act.cmd == Actuation::Cmd::Goto ? std::optional<Vec2>(res.act.target)
                                                        : std::nullopt;

        record_metrics(res, t);

        // Trace event (post-round snapshot).
        TraceEvent ev;
        ev.idx = this_event;
        ev.device = node.spec.id;
        ev.round_no = node.round_no;
        ev.time = t;
        ev.x = node.state.pos.x;
        ev.y = node.state.pos.y;
        ev.battery = node.state.battery;
        ev.avail = node.state.avail;
        ev.diameter = res.diameter;
        if (node.state.avail == AvailKind::Busy) ev.busy_task = Task::from_key(node.state.busy_key).id;
        for (const auto& [key, st] : exported_keys(node.prev_export))
            ev.active_keys.push_back(Task::from_key(key).id +
                                     (st == ProcessStatus::Terminating ? ":T" : ":A"));
        trace_.events.push_back(std::move(ev));

        // Broadcast to everyone currently in range.
        metrics_.messages_sent += 1;
        for (auto& [oid, other] : nodes_) {
            if (oid == node.spec.id || !other.alive) continue;
            double d = distance(node.state.pos, other.state.pos);
            if (d > radius_) continue;
            other.mailbox[node.spec.id] = {node.prev_export, t, this_event, d, radius_};
            metrics_.deliveries += 1;
        }

        metrics_.rounds += 1;
        node.round_no += 1;
        node.last_round = t;
        node.next_round = t + jitter_period(node);
    }

    void record_metrics(const MrtaResult& res, double t) {
        int claims_this_round = 0;
        for (const auto& [key, rep] : res.tasks) {
            std::string id = Task::from_key(key).id;
            auto& tm = metrics_.tasks[id];
            if (tm.id.empty()) tm.id = id;
            if (rep.claimed) {
                claims_this_round += 1;
                tm.claims.emplace_back(t, res.state.id);
                if (tm.first_assign < 0) tm.first_assign = t;
            }
            if (rep.completed && tm.completed < 0) tm.completed = t;
            if (rep.halted) {
                tm.conflicts_resolved += 1;
                metrics_.conflicts_resolved += 1;
            }
            if (rep.observed_claimants >= 2) {
                double gap = 2.0 * sc_.cfg.retention;
                auto it = last_conflict_obs_.find(id);
                if (it == last_conflict_obs_.end() || t - it->second > gap) {
                    tm.conflicts_detected += 1;
                    metrics_.conflicts_detected += 1;
                }
                last_conflict_obs_[id] = t;
            }
        }
        if (claims_this_round > 1)
            metrics_.violations.push_back("robot claimed two tasks in one round at t=" +
                                          std::to_string(t));
    }

    bool check_done(double t) {
        bool injected_all = true;
        for (const auto& [id, n] : nodes_)
            if (n.alive && n.next_task < sc_.tasks.size()) injected_all = false;
        bool quiet = true;
        for (const auto& [id, n] : nodes_) {
            if (!n.alive) continue;
            if (n.state.avail == AvailKind::Busy || !exported_keys(n.prev_export).empty())
                quiet = false;
        }
        bool faults_done = fault_idx_ >= sc_.faults.size();
        if (t >= sc_.min_time && injected_all && quiet && faults_done) {
            finish(t);
            return true;
        }
        return false;
    }

    void finish(double t) {
        if (finished_) return;
        finished_ = true;
        metrics_.end_time = std::min(t, sc_.duration);
        metrics_.all_completed = !sc_.tasks.empty();
        for (const auto& ts : sc_.tasks)
            if (metrics_.tasks[ts.task.id].completed < 0) metrics_.all_completed = false;
        metrics_.timed_out = !sc_.tasks.empty() && !metrics_.all_completed;
        for (auto& [id, tm] : metrics_.tasks)
            tm.reassignments = tm.claims.empty() ? 0 : static_cast<int>(tm.claims.size()) - 1;
    }

    Scenario sc_;
    std::map<DeviceId, Node> nodes_;
    EventTrace trace_;
    RunMetrics metrics_;
    std::map<std::string, double> last_conflict_obs_;
    double radius_;
    double now_ = 0;
    std::size_t fault_idx_ = 0;
    bool finished_ = false;
};

// Parses, runs, and writes outputs; the CLI's simulate mode. Returns the
// metrics, or nullopt when the scenario is invalid.
inline std::optional<RunMetrics> run_simulation(const std::string& scenario_path,
                                                std::optional<std::uint64_t> seed_override,
                                                const std::string& out_dir,
                                                std::vector<std::string>& errors) {
    auto sc = load_scenario(scenario_path, errors);
    if (!sc) return std::nullopt;
    if (seed_override) sc->seed = *seed_override;
    Simulator sim(std::move(*sc));
    RunMetrics m = sim.run();
    if (!out_dir.empty() && !sim.write_outputs(out_dir))
        errors.push_back("cannot write outputs to " + out_dir);
    return m;
}

}  // namespace xcs
