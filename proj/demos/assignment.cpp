// Runs a small task-assignment scenario in-process and prints the claim and
// completion timeline.

#include <cstdio>

#include "xcs/sim.hpp"

using namespace xcs;

int main() {
    Scenario sc;
    sc.arena_w = 4;
    sc.arena_h = 4;
    sc.comm_radius = 5;
    sc.duration = 40;
    sc.seed = 2;

    for (DeviceId id = 1; id <= 3; ++id) {
        RobotSpec r;
        r.id = id;
        r.pos = {0.5 + id, 0.5};
        r.battery = 0.9;
        sc.robots.push_back(r);
    }
    TaskSpec t;
    t.time = 1.0;
    t.task = Task{"T1", {1.0, 3.0}, 1.0};
    sc.tasks.push_back(t);

    Simulator sim(sc);
    RunMetrics m = sim.run();

    for (auto& [id, tm] : m.tasks) {
        std::printf("task %s: arrived %.1fs", id.c_str(), tm.arrival);
        for (auto& [when, robot] : tm.claims) std::printf(", claimed by robot %u at %.1fs", robot, when);
        if (tm.completed >= 0) std::printf(", completed at %.1fs", tm.completed);
        std::printf("\n");
    }
    std::printf("rounds=%ld messages=%ld\n", m.rounds, m.messages_sent);
    return 0;
}
