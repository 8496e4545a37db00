#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <set>
#include <thread>

#include "xcs/gateway.hpp"
#include "xcs/serialize.hpp"
#include "xcs/transport.hpp"

namespace xcs {

struct NodeConfig {
    DeviceId id = 0;
    MrtaConfig cfg;
    std::string goals_path;
    std::string actions_path;
    std::string feedback_path;
    Vec2 initial_pos;
    double initial_battery = 1.0;
    long max_rounds = -1;  // <0: run until stopped
};

// A live decision node: every round_period it polls the transport, reads
// goals and feedback through the gateway, runs one aggregate round, writes
// the action for its robot, and broadcasts its export.
class NodeRunner {
public:
    NodeRunner(NodeConfig cfg, Transceiver& link) : cfg_(std::move(cfg)), link_(link) {
        state_.id = cfg_.id;
        state_.pos = cfg_.initial_pos;
        state_.battery = cfg_.initial_battery;
    }

    // One round at time `now` (seconds on the node's own clock).
    void step(double now) {
        for (auto& msg : link_.poll()) {
            try {
                mailbox_[msg.sender] = {decode_export(msg.payload), now - msg.age};
            } catch (const DecodeError&) {
                // foreign or corrupt datagram; ignore
            }
        }

        if (auto fb = read_feedback(cfg_.feedback_path); fb && fb->robot == cfg_.id)
            apply_feedback(*fb);

        std::vector<Task> arrivals;
        std::vector<std::string> diags;
        for (const auto& g : read_goals(cfg_.goals_path, &diags)) {
            if (seen_goals_.count(g.task_id)) continue;
            seen_goals_.insert(g.task_id);
            arrivals.push_back(Task{g.task_id, {g.x, g.y}, now});
        }
        for (auto& d : diags) log(d);

        RoundContext ctx;
        ctx.self = cfg_.id;
        ctx.prev_self_export = prev_export_;
        for (auto it = mailbox_.begin(); it != mailbox_.end();) {
            if (now - it->second.received > cfg_.cfg.retention) {
                it = mailbox_.erase(it);
                continue;
            }
            ctx.admit(it->first, it->second.exp);
            ++it;
        }

        MrtaResult res = mrta_round(ctx, state_, arrivals, cfg_.cfg);
        state_ = res.state;
        prev_export_ = std::move(res.exp);
        last_result_tasks_ = res.tasks;

        write_current_action(res.act);

        if (!link_.send(encode_export(prev_export_)) && !link_.last_error().empty())
            log("transport: " + link_.last_error());

        rounds_ += 1;
    }

    // Blocking loop with a steady round clock; returns when `stop` is set or
    // max_rounds is reached.
    void run(const std::atomic<bool>& stop) {
        using clock = std::chrono::steady_clock;
        auto start = clock::now();
        auto next = start;
        while (!stop.load() && (cfg_.max_rounds < 0 || rounds_ < cfg_.max_rounds)) {
            double now = std::chrono::duration<double>(clock::now() - start).count();
            step(now);
            next += std::chrono::duration_cast<clock::duration>(
                std::chrono::duration<double>(cfg_.cfg.round_period));
            std::this_thread::sleep_until(next);
        }
    }

    const RobotState& state() const { return state_; }
    long rounds() const { return rounds_; }
    const std::map<Literal, TaskReport>& last_reports() const { return last_result_tasks_; }
    const ActionRecord& last_action() const { return last_action_; }

    std::function<void(const std::string&)> logger;

private:
    struct Stored {
        Export exp;
        double received = 0;
    };

    void log(const std::string& msg) {
        if (logger) logger(msg);
    }

    void apply_feedback(const FeedbackRecord& fb) {
        state_.pos = {fb.x, fb.y};
        state_.heading = fb.heading;
        state_.battery = fb.battery;
        if (fb.system == FeedbackRecord::SystemStatus::Fault) {
            failure_notice(state_, fault_reason_from_string(fb.fault_reason));
        } else if (state_.avail == AvailKind::Busy) {
            switch (fb.task) {
                case FeedbackRecord::TaskStatus::Succeeded: state_.exec = TaskExec::Arrived; break;
                case FeedbackRecord::TaskStatus::Failed: state_.exec = TaskExec::Failed; break;
                case FeedbackRecord::TaskStatus::Navigating: state_.exec = TaskExec::Navigating; break;
                case FeedbackRecord::TaskStatus::None: state_.exec = TaskExec::None; break;
            }
        }
    }

    void write_current_action(const Actuation& act) {
        ActionRecord rec;
        rec.robot = cfg_.id;
        if (act.cmd == Actuation::Cmd::Goto) {
            rec.cmd = ActionRecord::Cmd::Goto;
            rec.x = act.target.x;
            rec.y = act.target.y;
            rec.task_id = Task::from_key(act.task).id;
        } else {
            rec.cmd = ActionRecord::Cmd::Stop;
            rec.task_id = last_action_.task_id;
        }
        bool changed = rec.robot != last_action_.robot || rec.cmd != last_action_.cmd ||
                       rec.x != last_action_.x || rec.y != last_action_.y ||
                       rec.task_id != last_action_.task_id || rounds_ == 0;
        if (changed && !cfg_.actions_path.empty()) {
            if (!write_action(cfg_.actions_path, rec)) log("cannot write " + cfg_.actions_path);
        }
        last_action_ = rec;
    }

    NodeConfig cfg_;
    Transceiver& link_;
    RobotState state_;
    Export prev_export_;
    std::map<DeviceId, Stored> mailbox_;
    std::set<std::string> seen_goals_;
    std::map<Literal, TaskReport> last_result_tasks_;
    ActionRecord last_action_;
    long rounds_ = 0;
};

}  // namespace xcs
