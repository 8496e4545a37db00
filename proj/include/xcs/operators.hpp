#pragma once

#include <cstdint>

#include "xcs/round.hpp"

namespace xcs {

// Hop counts use the saturating integer infinity from literal.hpp.
inline constexpr std::int64_t kInfHops = kInfInt;

// Documented stabilization bound for the election pipeline on a static
// graph: after inputs stop changing (including removal of the current
// winner), every device agrees with the component minimum within
// kElectionSettleFactor * diameter_bound rounds. The factor is generous
// because recovery from a vanished winner waits for stale entries to age
// past their TTL before the next-best value re-floods.
inline constexpr std::int64_t kElectionSettleFactor = 25;

// Hop-count gradient: 0 at sources, elsewhere 1 + min over neighbours,
// saturating at infinity for devices with no path to a source.
inline Literal hop_dist(Round& r, bool source) {
    NValue out = r.exchange(NValue(Literal(kInfHops)), [&](const NValue& d) {
        Literal v = mux(Literal(source), Literal(0), sat_inc(r.fold(lit_min, d, Literal(kInfHops))));
        return retsend(NValue(v));
    });
    return out.get(r.self());
}

// Network-wide minimum of a totally ordered value, bounded by an upper
// estimate of the component diameter. Entries travel as (value, age) pairs;
// the age grows by one per hop and per round of staleness, and entries older
// than the diameter bound are discarded, so the output re-stabilizes after
// the minimum's holder disappears or a smaller value appears.
inline Literal diameter_election(Round& r, const Literal& value, std::int64_t diameter) {
    NValue out = r.exchange(NValue(Literal::pair(value, Literal(0))), [&](const NValue& w) {
        Literal best_v = value;
        std::int64_t best_age = 0;
        for (const auto& [d, e] : w.entries()) {
            if (d == r.self()) continue;
            std::int64_t age = e.second().as_int() + 1;
            if (age > diameter) continue;
            const Literal& v = e.first();
            if (v < best_v || (v == best_v && age < best_age)) {
                best_v = v;
                best_age = age;
            }
        }
        return retsend(NValue(Literal::pair(best_v, Literal(best_age))));
    });
    return out.get(r.self()).first();
}

// True once `current` has kept the same value for `theta` consecutive
// rounds on this device (theta = 1 accepts immediately). The counter rides
// the exchange self-slot, so no device state outside the export is needed.
inline bool stable_for(Round& r, const Literal& current, std::int64_t theta) {
    NValue out = r.exchange(NValue(Literal::pair(current, Literal(0))), [&](const NValue& w) {
        const Literal& prev = w.get(r.self());
        std::int64_t count = prev.first() == current ? prev.second().as_int() + 1 : 1;
        if (count > theta) count = theta;  // keeps the export quiescent once satisfied
        return retsend(NValue(Literal::pair(current, Literal(count))));
    });
    return out.get(r.self()).second().as_int() >= theta;
}

namespace detail {

// Aged maximum of per-device hop counts; -1 stands for "no value yet".
inline std::int64_t collect_max(Round& r, std::int64_t mine, std::int64_t ttl) {
    Literal own = Literal::pair(Literal(mine), Literal(0));
    NValue out = r.exchange(NValue(own), [&](const NValue& w) {
        std::int64_t best_v = mine;
        std::int64_t best_age = 0;
        for (const auto& [d, e] : w.entries()) {
            if (d == r.self()) continue;
            std::int64_t age = e.second().as_int() + 1;
            if (age > ttl) continue;
            std::int64_t v = e.first().as_int();
            if (v < 0) continue;
            if (v > best_v || (v == best_v && age < best_age)) {
                best_v = v;
                best_age = age;
            }
        }
        return retsend(NValue(Literal::pair(Literal(best_v), Literal(best_age))));
    });
    return out.get(r.self()).first().as_int();
}

}  // namespace detail

// Upper bound on the component diameter, recomputed every round from the
// live topology: elect the minimum device id, spread a hop gradient from it,
// collect the network maximum of that gradient, and return twice the result
// (2 x eccentricity bounds the diameter). `cap` is the TTL used while the
// estimate itself is still converging and must exceed the true diameter;
// `floor` is the smallest bound ever returned.
inline std::int64_t estimate_diameter(Round& r, std::int64_t cap = 16, std::int64_t floor = 2) {
    Literal leader = diameter_election(r, Literal::device(r.self()), cap);
    bool am_leader = leader == Literal::device(r.self());
    Literal hops = hop_dist(r, am_leader);
    std::int64_t mine = hops.as_int() == kInfHops ? -1 : hops.as_int();
    std::int64_t ecc = detail::collect_max(r, mine, cap);
    if (ecc < 0) return floor;
    std::int64_t bound = 2 * ecc;
    return bound < floor ? floor : bound;
}

}  // namespace xcs
