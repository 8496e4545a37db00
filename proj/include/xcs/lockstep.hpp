#pragma once

#include <functional>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "xcs/round.hpp"

namespace xcs {

// Synchronous round driver for aggregate programs: every device runs once
// per round and sees the previous round's exports of its current neighbours
// (one-round retention). Handy for unit tests, demos, and convergence
// measurements; the discrete-event simulator covers the asynchronous case.
class LockstepNetwork {
public:
    explicit LockstepNetwork(std::vector<DeviceId> devices) {
        for (DeviceId d : devices) nodes_[d];
    }

    void add_edge(DeviceId a, DeviceId b) {
        if (a == b) return;
        edges_.insert(ordered(a, b));
    }
    void remove_edge(DeviceId a, DeviceId b) { edges_.erase(ordered(a, b)); }
    void clear_edges() { edges_.clear(); }

    void remove_device(DeviceId d) {
        nodes_.erase(d);
        for (auto it = edges_.begin(); it != edges_.end();)
            it = (it->first == d || it->second == d) ? edges_.erase(it) : std::next(it);
    }

    std::vector<DeviceId> devices() const {
        std::vector<DeviceId> out;
        for (const auto& [d, n] : nodes_) out.push_back(d);
        return out;
    }

    bool connected(DeviceId a, DeviceId b) const { return edges_.count(ordered(a, b)) != 0; }

    // Runs one synchronous round of `program` on every device and returns
    // the per-device results. The program may differ per device through the
    // id argument.
    template <class Program>
    std::map<DeviceId, Literal> round(Program&& program) {
        std::map<DeviceId, Export> fresh;
        std::map<DeviceId, Literal> results;
        for (auto& [id, node] : nodes_) {
            RoundContext ctx;
            ctx.self = id;
            ctx.prev_self_export = node.prev_export;
            for (const auto& [other, peer] : nodes_) {
                if (other == id || !connected(id, other)) continue;
                if (peer.rounds_run > 0) ctx.admit(other, peer.prev_export);
            }
            Round r(ctx);
            results[id] = program(id, r);
            fresh[id] = r.take_export();
        }
        for (auto& [id, exp] : fresh) {
            nodes_[id].prev_export = std::move(exp);
            nodes_[id].rounds_run += 1;
        }
        rounds_ += 1;
        return results;
    }

    // Convenience: run `n` rounds and return the last results.
    template <class Program>
    std::map<DeviceId, Literal> rounds(int n, Program&& program) {
        std::map<DeviceId, Literal> last;
        for (int i = 0; i < n; ++i) last = round(program);
        return last;
    }

    const Export& export_of(DeviceId d) const { return nodes_.at(d).prev_export; }
    long total_rounds() const { return rounds_; }

private:
    struct Node {
        Export prev_export;
        long rounds_run = 0;
    };

    static std::pair<DeviceId, DeviceId> ordered(DeviceId a, DeviceId b) {
        return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    }

    std::map<DeviceId, Node> nodes_;
    std::set<std::pair<DeviceId, DeviceId>> edges_;
    long rounds_ = 0;
};

}  // namespace xcs
