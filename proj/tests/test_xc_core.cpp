#include <catch2/catch_amalgamated.hpp>

#include "xcs/round.hpp"

using namespace xcs;

namespace {

NValue nv(Literal dflt, std::initializer_list<std::pair<DeviceId, Literal>> entries) {
    NValue v(std::move(dflt));
    for (auto& [d, l] : entries) v.set(d, l);
    return v;
}

}  // namespace

TEST_CASE("literal ordering is total and pairs compare lexicographically") {
    REQUIRE(Literal(1) < Literal(2));
    REQUIRE(Literal(2.5) < Literal(3.5));
    REQUIRE(Literal(false) < Literal(true));
    REQUIRE(Literal("a") < Literal("b"));
    REQUIRE(Literal::pair(Literal(1), Literal(9)) < Literal::pair(Literal(2), Literal(0)));
    REQUIRE(Literal::pair(Literal(1), Literal(2)) < Literal::pair(Literal(1), Literal(3)));
    REQUIRE(Literal::pair(Literal(1), Literal(2)) == Literal::pair(Literal(1), Literal(2)));
    // distinct kinds order by kind rank, so min/max folds stay deterministic
    REQUIRE(Literal(true) < Literal(0));
    REQUIRE(Literal(7) < Literal(0.5));
}

TEST_CASE("literal accessors enforce kinds") {
    REQUIRE_THROWS_AS(Literal(3).as_bool(), XcTypeError);
    REQUIRE_THROWS_AS(Literal("x").as_real(), XcTypeError);
    REQUIRE(Literal(3).numeric() == 3.0);
    REQUIRE(Literal(2.5).numeric() == 2.5);
    REQUIRE_THROWS_AS(Literal("x").numeric(), XcTypeError);
}

TEST_CASE("nfold of an empty neighbourhood returns the local argument") {
    NValue w{Literal(kInfInt)};
    REQUIRE(nfold(lit_min, w, Literal(kInfInt), 0) == Literal(kInfInt));
}

TEST_CASE("nfold folds neighbour entries and takes self from the local argument") {
    // min over inf[d1->3, d2->7] on device d0 with l = inf
    NValue w = nv(Literal(kInfInt), {{1, Literal(3)}, {2, Literal(7)}});
    REQUIRE(nfold(lit_min, w, Literal(kInfInt), 0) == Literal(3));

    // 1 + 2 + 5 with the self entry excluded
    NValue s = nv(Literal(0), {{1, Literal(2)}, {2, Literal(5)}, {0, Literal(100)}});
    REQUIRE(nfold(lit_add, s, Literal(1), 0) == Literal(8));
}

TEST_CASE("nfold is invariant under entry order") {
    NValue a(Literal(0));
    a.set(3, Literal(4));
    a.set(1, Literal(9));
    a.set(2, Literal(5));
    NValue b(Literal(0));
    b.set(2, Literal(5));
    b.set(1, Literal(9));
    b.set(3, Literal(4));
    REQUIRE(nfold(lit_add, a, Literal(7), 0) == nfold(lit_add, b, Literal(7), 0));
    REQUIRE(nfold(lit_add, a, Literal(7), 0) == Literal(7 + 4 + 9 + 5));
}

TEST_CASE("nfold type mismatch raises a type error") {
    NValue w = nv(Literal(0), {{1, Literal("oops")}});
    REQUIRE_THROWS_AS(nfold(lit_add, w, Literal(1), 0), XcTypeError);
}

TEST_CASE("mux returns per the boolean and evaluates into plain values") {
    REQUIRE(mux(Literal(true), Literal(0), Literal(9)) == Literal(0));
    REQUIRE(mux(Literal(false), Literal(0), Literal(9)) == Literal(9));
    Literal v = Literal::pair(Literal(1), Literal(2));
    REQUIRE(mux(Literal(true), v, v) == v);
    REQUIRE_THROWS_AS(mux(Literal(3), Literal(0), Literal(9)), XcTypeError);
}

TEST_CASE("retsend returns the same value for ret and send") {
    ExchangeResult rs = retsend(NValue(Literal(7)));
    REQUIRE(rs.ret == rs.send);
    REQUIRE(rs.ret.dflt() == Literal(7));
}

TEST_CASE("first exchange round gathers init with the self entry present") {
    RoundContext ctx;
    ctx.self = 4;
    Round r(ctx);
    NValue seen;
    r.exchange(NValue(Literal(kInfInt)), [&](const NValue& w) {
        seen = w;
        return retsend(NValue(Literal(0)));
    });
    REQUIRE(seen.dflt() == Literal(kInfInt));
    REQUIRE(seen.has(4));
    REQUIRE(seen.get(4) == Literal(kInfInt));
    REQUIRE(seen.entries().size() == 1);
}

TEST_CASE("exchange self entry on the next round is the previous send") {
    RoundContext first;
    first.self = 4;
    Round r1(first);
    r1.exchange(NValue(Literal(kInfInt)), [&](const NValue&) { return retsend(NValue(Literal(5))); });

    RoundContext second;
    second.self = 4;
    second.prev_self_export = r1.take_export();
    Round r2(second);
    Literal self_seen;
    r2.exchange(NValue(Literal(kInfInt)), [&](const NValue& w) {
        self_seen = w.get(4);
        return retsend(NValue(Literal(6)));
    });
    REQUIRE(self_seen == Literal(5));
}

TEST_CASE("exchange picks up neighbour payloads at the same path") {
    // neighbour 9 sent 2 at this exchange's path
    RoundContext nbr_ctx;
    nbr_ctx.self = 9;
    Round nbr(nbr_ctx);
    nbr.exchange(NValue(Literal(kInfInt)), [&](const NValue&) { return retsend(NValue(Literal(2))); });

    RoundContext ctx;
    ctx.self = 4;
    ctx.admit(9, nbr.current_export());
    Round r(ctx);
    NValue seen;
    r.exchange(NValue(Literal(kInfInt)), [&](const NValue& w) {
        seen = w;
        return retsend(NValue(Literal(1)));
    });
    REQUIRE(seen.has(9));
    REQUIRE(seen.get(9) == Literal(2));
}

TEST_CASE("per-neighbour send entries reach only the addressed device") {
    RoundContext sender_ctx;
    sender_ctx.self = 1;
    Round sender(sender_ctx);
    sender.exchange(NValue(Literal(0)), [&](const NValue&) {
        NValue send(Literal(7));  // default for everyone else
        send.set(2, Literal(42));
        return ExchangeResult{NValue(Literal(0)), send};
    });
    Export exp = sender.take_export();

    for (DeviceId receiver : {DeviceId(2), DeviceId(3)}) {
        RoundContext ctx;
        ctx.self = receiver;
        ctx.admit(1, exp);
        Round r(ctx);
        Literal seen;
        r.exchange(NValue(Literal(0)), [&](const NValue& w) {
            seen = w.get(1);
            return retsend(NValue(Literal(0)));
        });
        REQUIRE(seen == (receiver == 2 ? Literal(42) : Literal(7)));
    }
}

TEST_CASE("two exchanges in one round use distinct paths") {
    RoundContext ctx;
    ctx.self = 1;
    Round r(ctx);
    r.exchange(NValue(Literal(1)), [&](const NValue&) { return retsend(NValue(Literal(1))); });
    r.exchange(NValue(Literal(2)), [&](const NValue&) { return retsend(NValue(Literal(2))); });
    REQUIRE(r.current_export().size() == 2);
}

TEST_CASE("a duplicate export path aborts the round") {
    RoundContext ctx;
    ctx.self = 1;
    Round r(ctx);
    AlignmentPath p;
    p.push_back(PathToken::exchange(0));
    r.put_raw(p, NValue(Literal(1)));
    REQUIRE_THROWS_AS(r.put_raw(p, NValue(Literal(2))), AlignmentError);
}

TEST_CASE("branch arms do not align with each other") {
    // device 1 takes the then-arm, device 2 the else-arm: their exchanges
    // must not exchange data even though each is the first exchange of its arm
    RoundContext c1;
    c1.self = 1;
    Round r1(c1);
    r1.branch(
        true,
        [&] { return r1.exchange(NValue(Literal(10)), [&](const NValue&) { return retsend(NValue(Literal(10))); }); },
        [&] { return r1.exchange(NValue(Literal(20)), [&](const NValue&) { return retsend(NValue(Literal(20))); }); });
    Export exp1 = r1.take_export();

    RoundContext c2;
    c2.self = 2;
    c2.admit(1, exp1);
    Round r2(c2);
    NValue seen;
    r2.branch(
        false,
        [&] { return r2.exchange(NValue(Literal(10)), [&](const NValue&) { return retsend(NValue(Literal(10))); }); },
        [&] {
            return r2.exchange(NValue(Literal(20)), [&](const NValue& w) {
                seen = w;
                return retsend(NValue(Literal(20)));
            });
        });
    REQUIRE_FALSE(seen.has(1));  // device 1 exported only under the then-arm

    // same arm does align
    RoundContext c3;
    c3.self = 3;
    c3.admit(1, exp1);
    Round r3(c3);
    NValue seen3;
    r3.branch(
        true,
        [&] {
            return r3.exchange(NValue(Literal(10)), [&](const NValue& w) {
                seen3 = w;
                return retsend(NValue(Literal(10)));
            });
        },
        [&] { return r3.exchange(NValue(Literal(20)), [&](const NValue&) { return retsend(NValue(Literal(20))); }); });
    REQUIRE(seen3.has(1));
    REQUIRE(seen3.get(1) == Literal(10));
}

TEST_CASE("rounds are deterministic for identical contexts") {
    auto program = [](Round& r) {
        NValue a = r.exchange(NValue(Literal(3)), [&](const NValue& w) {
            return retsend(NValue(r.fold(lit_add, w, Literal(1))));
        });
        return a;
    };
    RoundContext nbr_ctx;
    nbr_ctx.self = 7;
    Round nbr(nbr_ctx);
    program(nbr);
    Export nbr_exp = nbr.take_export();

    auto run_once = [&] {
        RoundContext ctx;
        ctx.self = 1;
        ctx.admit(7, nbr_exp);
        Round r(ctx);
        NValue ret = program(r);
        return std::make_pair(ret, r.take_export());
    };
    auto [ret_a, exp_a] = run_once();
    auto [ret_b, exp_b] = run_once();
    REQUIRE(ret_a == ret_b);
    REQUIRE(exp_a == exp_b);
}
