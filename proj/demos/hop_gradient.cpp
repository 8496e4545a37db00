// Minimal aggregate program: a hop-count gradient over a small synchronous
// network, printed round by round.

#include <cstdio>

#include "xcs/lockstep.hpp"
#include "xcs/operators.hpp"

using namespace xcs;

int main() {
    //   1 - 2 - 3 - 4
    //       |
    //       5
    LockstepNetwork net({1, 2, 3, 4, 5});
    net.add_edge(1, 2);
    net.add_edge(2, 3);
    net.add_edge(3, 4);
    net.add_edge(2, 5);

    auto program = [](DeviceId id, Round& r) { return hop_dist(r, id == 1); };

    for (int round = 1; round <= 5; ++round) {
        auto out = net.round(program);
        std::printf("round %d:", round);
        for (auto& [id, hops] : out) {
            if (hops.as_int() == kInfHops)
                std::printf("  %u:inf", id);
            else
                std::printf("  %u:%lld", id, static_cast<long long>(hops.as_int()));
        }
        std::printf("\n");
    }
    return 0;
}
