#pragma once

#include <bit>
#include <cstring>
#include <stdexcept>
#include <string>

#include "xcs/context.hpp"

namespace xcs {

class DecodeError : public std::runtime_error {
public:
    explicit DecodeError(const std::string& what) : std::runtime_error(what) {}
};

// Canonical binary encoding of exports for the wire and for traces.
// Version 1. All integers little-endian; maps serialized in key order, so
// equal exports encode to equal bytes.
inline constexpr std::uint8_t kExportCodecVersion = 1;

namespace codec {

inline void put_u8(std::string& out, std::uint8_t v) { out.push_back(static_cast<char>(v)); }

inline void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

struct Reader {
    const std::string& buf;
    std::size_t pos = 0;

    void need(std::size_t n) const {
        if (pos + n > buf.size()) throw DecodeError("truncated payload");
    }
    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(buf[pos++]);
    }
    std::uint16_t u16() {
        need(2);
        std::uint16_t v = static_cast<std::uint8_t>(buf[pos]) |
                          (static_cast<std::uint16_t>(static_cast<std::uint8_t>(buf[pos + 1])) << 8);
        pos += 2;
        return v;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(buf[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(buf[pos + i])) << (8 * i);
        pos += 8;
        return v;
    }
    std::string bytes(std::size_t n) {
        need(n);
        std::string s = buf.substr(pos, n);
        pos += n;
        return s;
    }
    bool done() const { return pos == buf.size(); }
};

}  // namespace codec

inline void encode_literal(std::string& out, const Literal& l) {
    using codec::put_u8;
    put_u8(out, static_cast<std::uint8_t>(l.kind()));
    switch (l.kind()) {
        case Literal::Kind::Bool:
            put_u8(out, l.as_bool() ? 1 : 0);
            break;
        case Literal::Kind::Int:
            codec::put_u64(out, static_cast<std::uint64_t>(l.as_int()));
            break;
        case Literal::Kind::Real:
            codec::put_u64(out, std::bit_cast<std::uint64_t>(l.as_real()));
            break;
        case Literal::Kind::Device:
            codec::put_u32(out, l.as_device());
            break;
        case Literal::Kind::Str: {
            const std::string& s = l.as_str();
            codec::put_u32(out, static_cast<std::uint32_t>(s.size()));
            out += s;
            break;
        }
        case Literal::Kind::Pair:
            encode_literal(out, l.first());
            encode_literal(out, l.second());
            break;
        case Literal::Kind::Tuple:
            codec::put_u32(out, static_cast<std::uint32_t>(l.items().size()));
            for (const auto& item : l.items()) encode_literal(out, item);
            break;
    }
}

inline Literal decode_literal(codec::Reader& in) {
    auto kind = static_cast<Literal::Kind>(in.u8());
    switch (kind) {
        case Literal::Kind::Bool:
            return Literal(in.u8() != 0);
        case Literal::Kind::Int:
            return Literal(static_cast<long long>(in.u64()));
        case Literal::Kind::Real:
            return Literal(std::bit_cast<double>(in.u64()));
        case Literal::Kind::Device:
            return Literal::device(in.u32());
        case Literal::Kind::Str: {
            std::uint32_t n = in.u32();
            return Literal(in.bytes(n));
        }
        case Literal::Kind::Pair: {
            Literal a = decode_literal(in);
            Literal b = decode_literal(in);
            return Literal::pair(std::move(a), std::move(b));
        }
        case Literal::Kind::Tuple: {
            std::uint32_t n = in.u32();
            if (n > 4096) throw DecodeError("tuple too large");
            std::vector<Literal> items;
            items.reserve(n);
            for (std::uint32_t i = 0; i < n; ++i) items.push_back(decode_literal(in));
            return Literal::tuple(std::move(items));
        }
    }
    throw DecodeError("unknown literal kind");
}

inline void encode_path(std::string& out, const AlignmentPath& p) {
    codec::put_u16(out, static_cast<std::uint16_t>(p.size()));
    for (const auto& t : p) {
        codec::put_u8(out, static_cast<std::uint8_t>(t.tag));
        codec::put_u32(out, t.index);
        codec::put_u32(out, t.arm);
        if (t.tag == PathToken::Tag::Key) encode_literal(out, t.key);
    }
}

inline AlignmentPath decode_path(codec::Reader& in) {
    std::uint16_t n = in.u16();
    if (n > 256) throw DecodeError("path too deep");
    AlignmentPath p;
    p.reserve(n);
    for (std::uint16_t i = 0; i < n; ++i) {
        PathToken t;
        t.tag = static_cast<PathToken::Tag>(in.u8());
        if (t.tag > PathToken::Tag::Key) throw DecodeError("unknown path token tag");
        t.index = in.u32();
        t.arm = in.u32();
        if (t.tag == PathToken::Tag::Key) t.key = decode_literal(in);
        p.push_back(std::move(t));
    }
    return p;
}

inline void encode_nvalue(std::string& out, const NValue& v) {
    encode_literal(out, v.dflt());
    codec::put_u16(out, static_cast<std::uint16_t>(v.entries().size()));
    for (const auto& [d, l] : v.entries()) {
        codec::put_u32(out, d);
        encode_literal(out, l);
    }
}

inline NValue decode_nvalue(codec::Reader& in) {
    NValue v(decode_literal(in));
    std::uint16_t n = in.u16();
    for (std::uint16_t i = 0; i < n; ++i) {
        DeviceId d = in.u32();
        v.set(d, decode_literal(in));
    }
    return v;
}

inline std::string encode_export(const Export& e) {
    std::string out;
    codec::put_u8(out, kExportCodecVersion);
    codec::put_u32(out, static_cast<std::uint32_t>(e.size()));
    for (const auto& [path, nv] : e) {
        encode_path(out, path);
        encode_nvalue(out, nv);
    }
    return out;
}

inline Export decode_export(const std::string& buf) {
    codec::Reader in{buf};
    std::uint8_t version = in.u8();
    if (version != kExportCodecVersion) throw DecodeError("unsupported export version");
    std::uint32_t n = in.u32();
    if (n > 65536) throw DecodeError("export too large");
    Export e;
    for (std::uint32_t i = 0; i < n; ++i) {
        AlignmentPath p = decode_path(in);
        NValue v = decode_nvalue(in);
        e.emplace(std::move(p), std::move(v));
    }
    if (!in.done()) throw DecodeError("trailing bytes in export");
    return e;
}

}  // namespace xcs
