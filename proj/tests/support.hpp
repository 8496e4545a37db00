// Synchronous multi-robot harness used by the mrta and acceptance tests:
// full control over topology and robot state, one-round message retention,
// no motion unless the test moves robots itself.
#pragma once

#include <map>
#include <set>
#include <vector>

#include "xcs/mrta.hpp"

namespace support {

using namespace xcs;

class MrtaBench {
public:
    explicit MrtaBench(MrtaConfig cfg = {}) : cfg_(std::move(cfg)) {}

    RobotState& add_robot(DeviceId id, Vec2 pos, double battery = 1.0) {
        Dev& d = devs_[id];
        d.state.id = id;
        d.state.pos = pos;
        d.state.battery = battery;
        return d.state;
    }

    void connect(DeviceId a, DeviceId b) {
        if (a != b) edges_.insert(ordered(a, b));
    }
    void disconnect(DeviceId a, DeviceId b) { edges_.erase(ordered(a, b)); }
    void connect_all() {
        for (const auto& [a, x] : devs_)
            for (const auto& [b, y] : devs_)
                if (a < b) edges_.insert({a, b});
    }
    void disconnect_all() { edges_.clear(); }
    bool connected(DeviceId a, DeviceId b) const { return edges_.count(ordered(a, b)) != 0; }

    void deliver(DeviceId id, const Task& t) { devs_.at(id).pending.push_back(t); }

    RobotState& state(DeviceId id) { return devs_.at(id).state; }
    const std::map<Literal, TaskReport>& reports(DeviceId id) const { return devs_.at(id).last; }
    const Export& export_of(DeviceId id) const { return devs_.at(id).prev; }

    // One synchronous round over the previous round's exports.
    void round() {
        std::map<DeviceId, Export> fresh;
        for (auto& [id, dev] : devs_) {
            // execution feedback mirrors the simulator: arrival within eps
            if (dev.state.avail == AvailKind::Busy && dev.state.exec == TaskExec::None) {
                Vec2 target = Task::from_key(dev.state.busy_key).target;
                dev.state.exec = distance(dev.state.pos, target) <= cfg_.arrival_eps
                                     ? TaskExec::Arrived
                                     : TaskExec::Navigating;
            }
            RoundContext ctx;
            ctx.self = id;
            ctx.prev_self_export = dev.prev;
            for (const auto& [other, peer] : devs_) {
                if (other == id || !connected(id, other) || peer.rounds == 0) continue;
                ctx.admit(other, peer.prev);
            }
            MrtaResult res = mrta_round(ctx, dev.state, dev.pending, cfg_);
            dev.pending.clear();
            dev.state = res.state;
            dev.state.exec = TaskExec::None;
            dev.last = res.tasks;
            fresh[id] = std::move(res.exp);
        }
        for (auto& [id, exp] : fresh) {
            devs_[id].prev = std::move(exp);
            devs_[id].rounds += 1;
        }
        rounds_ += 1;
    }

    void rounds(int n) {
        for (int i = 0; i < n; ++i) round();
    }

    std::vector<DeviceId> busy_on(const Task& t) const {
        std::vector<DeviceId> out;
        for (const auto& [id, d] : devs_)
            if (d.state.avail == AvailKind::Busy && d.state.busy_key == t.key()) out.push_back(id);
        return out;
    }

    bool anyone_exports(const Literal& key) const {
        for (const auto& [id, d] : devs_)
            if (exported_keys(d.prev).count(key)) return true;
        return false;
    }

    long total_rounds() const { return rounds_; }

private:
    struct Dev {
        RobotState state;
        Export prev;
        std::vector<Task> pending;
        std::map<Literal, TaskReport> last;
        long rounds = 0;
    };

    static std::pair<DeviceId, DeviceId> ordered(DeviceId a, DeviceId b) {
        return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    }

    MrtaConfig cfg_;
    std::map<DeviceId, Dev> devs_;
    std::set<std::pair<DeviceId, DeviceId>> edges_;
    long rounds_ = 0;
};

}  // namespace support
