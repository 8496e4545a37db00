#pragma once

#include <map>

#include "xcs/nvalue.hpp"
#include "xcs/path.hpp"

namespace xcs {

// Everything a device broadcasts in one round: one nvalue per exchange
// occurrence, keyed by alignment path. Receivers project each nvalue onto
// their own slot when they build their context.
using Export = std::map<AlignmentPath, NValue>;

// Per-device, per-round input: the messages gathered from neighbours
// (already projected onto this device) and the device's own previous export.
struct RoundContext {
    DeviceId self = 0;
    std::map<DeviceId, std::map<AlignmentPath, Literal>> inbox;
    Export prev_self_export;

    // Projects a neighbour's export onto `self` and stores it. At most one
    // payload per (neighbor, path); a newer message replaces the older one.
    void admit(DeviceId sender, const Export& theirs) {
        if (sender == self) return;
        auto& slot = inbox[sender];
        slot.clear();
        for (const auto& [path, nv] : theirs) slot.emplace(path, nv.get(self));
    }
};

}  // namespace xcs
