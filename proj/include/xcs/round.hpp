#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "xcs/context.hpp"

namespace xcs {

// Two exchange occurrences landed on the same alignment path in one round.
// That is a bug in the aggregate program; the round must be aborted.
class AlignmentError : public std::runtime_error {
public:
    explicit AlignmentError(const std::string& what) : std::runtime_error(what) {}
};

struct ExchangeResult {
    NValue ret;
    NValue send;
};

// `return e send e`.
inline ExchangeResult retsend(NValue v) { return {v, v}; }

// Multiplexer: both arguments are evaluated by the caller, so mux never
// splits alignment the way a branch does.
inline Literal mux(const Literal& b, const Literal& x, const Literal& y) {
    return b.as_bool() ? x : y;
}

// Fold of `f` over `l` and the neighbour entries of `w`, skipping the entry
// for `self` (its value is taken from `l`). Entries are visited in device-id
// order; `f` must be associative and commutative for the result to be
// neighbour-order independent.
template <class F>
Literal nfold(F&& f, const NValue& w, const Literal& l, DeviceId self) {
    Literal acc = l;
    for (const auto& [d, v] : w.entries()) {
        if (d == self) continue;
        acc = f(acc, v);
    }
    return acc;
}

// Evaluates one device round of an aggregate program. The program is plain
// host code calling exchange/branch/spawn on this object; call paths are
// tracked so that payloads align with the same sub-expression on
// neighbouring devices. One Round instance per device activation.
class Round {
public:
    explicit Round(const RoundContext& ctx) : ctx_(&ctx) { counters_.push_back(0); }

    Round(const Round&) = delete;
    Round& operator=(const Round&) = delete;

    DeviceId self() const { return ctx_->self; }
    const RoundContext& context() const { return *ctx_; }

    // The communication primitive. Gathers the neighbouring value for this
    // call site, evaluates `body` on it, records the send half in the
    // export, and returns the ret half.
    //
    // The self entry of the gathered value is the value this device sent
    // here last round (init on the first round); the default comes from the
    // same source. Neighbours appear only if their last message carries a
    // payload at this exact path.
    template <class Body>
    NValue exchange(const NValue& init, Body&& body) {
        Frame frame(*this, PathToken::exchange(counters_.back()++));
        const AlignmentPath p = path_;

        const NValue* prev = nullptr;
        if (auto it = ctx_->prev_self_export.find(p); it != ctx_->prev_self_export.end())
            prev = &it->second;
        const NValue& base = prev ? *prev : init;

        NValue w(base.dflt());
        for (const auto& [nbr, paths] : ctx_->inbox) {
            if (nbr == ctx_->self) continue;
            if (auto it = paths.find(p); it != paths.end()) w.set(nbr, it->second);
        }
        w.set(ctx_->self, base.get(ctx_->self));

        ExchangeResult res = body(static_cast<const NValue&>(w));
        auto [pos, inserted] = export_.emplace(p, std::move(res.send));
        if (!inserted)
            throw AlignmentError("duplicate export entry at " + path_to_string(p));
        return std::move(res.ret);
    }

    template <class F>
    Literal fold(F&& f, const NValue& w, const Literal& l) const {
        return xcs::nfold(std::forward<F>(f), w, l, ctx_->self);
    }

    // Aligned conditional: only the taken arm runs, and the two arms live on
    // disjoint paths, so devices in different arms do not exchange data.
    template <class Then, class Else>
    auto branch(bool cond, Then&& then_fn, Else&& else_fn) {
        Frame frame(*this, PathToken::branch(counters_.back()++, cond));
        return cond ? then_fn() : else_fn();
    }

    const Export& current_export() const { return export_; }
    Export take_export() { return std::move(export_); }

    // --- low-level surface for process machinery -------------------------

    // Pushes a token and opens a fresh occurrence frame; pops on destruction.
    class Frame {
    public:
        Frame(Round& r, PathToken tok) : r_(r) {
            r_.path_.push_back(std::move(tok));
            r_.counters_.push_back(0);
        }
        ~Frame() {
            r_.counters_.pop_back();
            r_.path_.pop_back();
        }
        Frame(const Frame&) = delete;
        Frame& operator=(const Frame&) = delete;

    private:
        Round& r_;
    };

    std::uint32_t next_occurrence() { return counters_.back()++; }
    const AlignmentPath& current_path() const { return path_; }

    // Direct export slot, used by the process machinery for its status
    // entries. Same duplicate rule as exchange.
    void put_raw(const AlignmentPath& p, NValue v) {
        auto [pos, inserted] = export_.emplace(p, std::move(v));
        if (!inserted)
            throw AlignmentError("duplicate export entry at " + path_to_string(p));
    }

    // Drops every export entry at or under `prefix`.
    void prune_subtree(const AlignmentPath& prefix) {
        auto it = export_.lower_bound(prefix);
        while (it != export_.end() && starts_with(it->first, prefix)) it = export_.erase(it);
    }

private:
    const RoundContext* ctx_;
    Export export_;
    AlignmentPath path_;
    std::vector<std::uint32_t> counters_;
};

}  // namespace xcs
