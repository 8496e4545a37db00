#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "xcs/serialize.hpp"

using namespace xcs;

namespace {

Literal random_literal(std::mt19937_64& rng, int depth = 0) {
    std::uniform_int_distribution<int> kind(0, depth >= 2 ? 4 : 6);
    switch (kind(rng)) {
        case 0: return Literal(static_cast<bool>(rng() & 1));
        case 1: return Literal(static_cast<long long>(rng()));
        case 2: return Literal(static_cast<double>(static_cast<std::int64_t>(rng() % 2000001) - 1000000) / 997.0);
        case 3: return Literal::device(static_cast<DeviceId>(rng()));
        case 4: {
            std::string s;
            for (int i = static_cast<int>(rng() % 8); i > 0; --i)
                s += static_cast<char>('a' + rng() % 26);
            return Literal(s);
        }
        case 5: return Literal::pair(random_literal(rng, depth + 1), random_literal(rng, depth + 1));
        default: {
            std::vector<Literal> items;
            for (int i = static_cast<int>(rng() % 4); i > 0; --i)
                items.push_back(random_literal(rng, depth + 1));
            return Literal::tuple(std::move(items));
        }
    }
}

AlignmentPath random_path(std::mt19937_64& rng) {
    AlignmentPath p;
    int n = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < n; ++i) {
        switch (rng() % 4) {
            case 0: p.push_back(PathToken::exchange(static_cast<std::uint32_t>(rng() % 8))); break;
            case 1: p.push_back(PathToken::branch(static_cast<std::uint32_t>(rng() % 8), rng() & 1)); break;
            case 2: p.push_back(PathToken::spawn(static_cast<std::uint32_t>(rng() % 8))); break;
            default: p.push_back(PathToken::for_key(random_literal(rng, 2))); break;
        }
    }
    return p;
}

}  // namespace

TEST_CASE("export round-trips through the codec") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        Export e;
        int n = static_cast<int>(rng() % 6);
        for (int i = 0; i < n; ++i) {
            NValue v(random_literal(rng));
            for (int j = static_cast<int>(rng() % 3); j > 0; --j)
                v.set(static_cast<DeviceId>(rng() % 32), random_literal(rng));
            e[random_path(rng)] = v;
        }
        std::string bytes = encode_export(e);
        Export back = decode_export(bytes);
        REQUIRE(back == e);
        // canonical: re-encoding the decoded export gives the same bytes
        REQUIRE(encode_export(back) == bytes);
    }
}

TEST_CASE("codec output is canonical and versioned") {
    Export e;
    AlignmentPath p{PathToken::exchange(0)};
    e[p] = NValue(Literal(5));
    std::string bytes = encode_export(e);
    REQUIRE(static_cast<std::uint8_t>(bytes[0]) == kExportCodecVersion);

    std::string tampered = bytes;
    tampered[0] = 99;
    REQUIRE_THROWS_AS(decode_export(tampered), DecodeError);
}

TEST_CASE("decoder rejects truncated and trailing data") {
    Export e;
    e[{PathToken::exchange(0)}] = NValue(Literal::pair(Literal(1), Literal("abc")));
    std::string bytes = encode_export(e);
    for (std::size_t cut = 1; cut < bytes.size(); ++cut) {
        std::string prefix = bytes.substr(0, cut);
        REQUIRE_THROWS_AS(decode_export(prefix), DecodeError);
    }
    std::string extra = bytes + "x";
    REQUIRE_THROWS_AS(decode_export(extra), DecodeError);
}

TEST_CASE("infinity and device sentinels survive the codec") {
    Export e;
    NValue v{Literal(kInfInt)};
    v.set(kNoDevice, Literal::device(kNoDevice));
    e[{PathToken::exchange(3)}] = v;
    Export back = decode_export(encode_export(e));
    REQUIRE(back == e);
}
