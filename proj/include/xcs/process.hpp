#pragma once

#include <map>
#include <set>

#include "xcs/round.hpp"

namespace xcs {

enum class ProcessStatus : std::uint8_t { Active = 0, Inactive = 1, Terminating = 2 };

struct ProcessOutput {
    Literal output;
    ProcessStatus status = ProcessStatus::Active;
};

// Returning this from a process behavior raises the key's status to
// Terminating; the tombstone then floods and the key is garbage-collected
// everywhere after the grace window.
inline ProcessOutput terminate_process(Literal output = {}) {
    return {std::move(output), ProcessStatus::Terminating};
}

struct ProcessConfig {
    // Rounds a Terminating tombstone keeps being re-broadcast before the key
    // is collected. Must exceed the message retention window (in rounds) or
    // stale messages can revive a dead key.
    int grace_rounds = 20;
};

namespace detail {

// Status entries live at the key frame path itself; every exchange inside
// the frame appends at least one token, so the slot can never collide.
inline Literal status_entry(ProcessStatus st, std::int64_t age) {
    return Literal::pair(Literal(static_cast<long long>(st)), Literal(age));
}

struct KeyScan {
    bool in_gen = false;
    bool has_prev = false;
    ProcessStatus prev_status = ProcessStatus::Inactive;
    std::int64_t prev_age = 0;
    bool nbr_active = false;
    bool nbr_terminating = false;
};

inline void note_status(KeyScan& ks, const Literal& entry, bool mine) {
    auto st = static_cast<ProcessStatus>(entry.first().as_int());
    if (mine) {
        ks.has_prev = true;
        ks.prev_status = st;
        ks.prev_age = entry.second().as_int();
    } else if (st == ProcessStatus::Active) {
        ks.nbr_active = true;
    } else if (st == ProcessStatus::Terminating) {
        ks.nbr_terminating = true;
    }
}

}  // namespace detail

// Runs one keyed collective computation per key in `gen_set` plus every key
// observed in neighbour messages this round, each in its own alignment
// namespace (the path extended by the key). Concurrent generators of one key
// merge into a single computation because their paths coincide.
//
// Propagation: a device broadcasts a key's sub-exports only while its status
// is Active. Inactive devices run the behavior but stay silent. Terminating
// floods as a tombstone for `grace_rounds` rounds and is then collected.
//
// Returns the outputs of the keys whose behavior ran this round with status
// other than Inactive.
template <class Behavior>
std::map<Literal, Literal> spawn(Round& r, const std::set<Literal>& gen_set, Behavior&& behavior,
                                 const ProcessConfig& pc = {}) {
    const PathToken site = PathToken::spawn(r.next_occurrence());

    AlignmentPath base = r.current_path();
    base.push_back(site);

    std::map<Literal, detail::KeyScan> keys;
    for (const auto& k : gen_set) keys[k].in_gen = true;

    auto scan = [&](const std::map<AlignmentPath, Literal>& paths, bool mine) {
        for (auto it = paths.lower_bound(base); it != paths.end(); ++it) {
            const AlignmentPath& p = it->first;
            if (!starts_with(p, base)) break;
            if (p.size() != base.size() + 1) continue;
            const PathToken& kt = p.back();
            if (kt.tag != PathToken::Tag::Key) continue;
            detail::note_status(keys[kt.key], it->second, mine);
        }
    };
    for (const auto& [nbr, paths] : r.context().inbox) {
        if (nbr == r.self()) continue;
        scan(paths, false);
    }
    {
        // Own previous export holds full nvalues; project onto a literal map.
        std::map<AlignmentPath, Literal> mine;
        const auto& prev = r.context().prev_self_export;
        for (auto it = prev.lower_bound(base); it != prev.end(); ++it) {
            if (!starts_with(it->first, base)) break;
            if (it->first.size() == base.size() + 1) mine.emplace(it->first, it->second.get(r.self()));
        }
        scan(mine, true);
    }

    std::map<Literal, Literal> outputs;
    for (auto& [key, ks] : keys) {
        Round::Frame sf(r, site);
        Round::Frame kf(r, PathToken::for_key(key));
        const AlignmentPath key_path = r.current_path();

        const bool was_active = ks.has_prev && ks.prev_status == ProcessStatus::Active;
        const bool involved = ks.in_gen || was_active || ks.nbr_active;

        if (ks.has_prev && ks.prev_status == ProcessStatus::Terminating) {
            std::int64_t age = ks.prev_age + 1;
            if (age < pc.grace_rounds)
                r.put_raw(key_path, NValue(detail::status_entry(ProcessStatus::Terminating, age)));
            // else: grace expired, collect the key.
            continue;
        }
        if (involved && ks.nbr_terminating) {
            r.put_raw(key_path, NValue(detail::status_entry(ProcessStatus::Terminating, 0)));
            continue;
        }
        if (!involved) continue;

        ProcessOutput out = behavior(r, key);
        switch (out.status) {
            case ProcessStatus::Active:
                r.put_raw(key_path, NValue(detail::status_entry(ProcessStatus::Active, 0)));
                outputs.emplace(key, std::move(out.output));
                break;
            case ProcessStatus::Inactive:
                // Border device: computed, but must not re-broadcast the key.
                r.prune_subtree(key_path);
                break;
            case ProcessStatus::Terminating:
                r.prune_subtree(key_path);
                r.put_raw(key_path, NValue(detail::status_entry(ProcessStatus::Terminating, 0)));
                outputs.emplace(key, std::move(out.output));
                break;
        }
    }
    return outputs;
}

}  // namespace xcs
