#pragma once

#include <cstdint>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace xcs {

using DeviceId = std::uint32_t;

// Sentinel for "no device" slots (e.g. an unassigned claim).
inline constexpr DeviceId kNoDevice = 0xFFFFFFFFu;

class XcTypeError : public std::runtime_error {
public:
    explicit XcTypeError(const std::string& what) : std::runtime_error(what) {}
};

// A value exchanged between devices: closed tagged union of scalars plus
// pairs and tuples of literals. Every kind is totally ordered; the order is
// kind rank first, then value, with sequences compared lexicographically.
class Literal {
public:
    enum class Kind : std::uint8_t {
        Bool = 0,
        Int = 1,
        Real = 2,
        Device = 3,
        Str = 4,
        Pair = 5,
        Tuple = 6,
    };

    Literal() : kind_(Kind::Int), int_(0) {}
    Literal(bool v) : kind_(Kind::Bool), bool_(v) {}
    Literal(int v) : kind_(Kind::Int), int_(v) {}
    Literal(long v) : kind_(Kind::Int), int_(v) {}
    Literal(long long v) : kind_(Kind::Int), int_(v) {}
    Literal(double v) : kind_(Kind::Real), real_(v) {}
    Literal(const char* s) : kind_(Kind::Str), str_(s) {}
    Literal(std::string s) : kind_(Kind::Str), str_(std::move(s)) {}

    static Literal device(DeviceId d) {
        Literal l;
        l.kind_ = Kind::Device;
        l.dev_ = d;
        return l;
    }

    static Literal pair(Literal a, Literal b) {
        Literal l;
        l.kind_ = Kind::Pair;
        l.items_.reserve(2);
        l.items_.push_back(std::move(a));
        l.items_.push_back(std::move(b));
        return l;
    }

    static Literal tuple(std::vector<Literal> items) {
        Literal l;
        l.kind_ = Kind::Tuple;
        l.items_ = std::move(items);
        return l;
    }

    Kind kind() const { return kind_; }
    bool is(Kind k) const { return kind_ == k; }

    bool as_bool() const {
        require(Kind::Bool, "bool");
        return bool_;
    }
    std::int64_t as_int() const {
        require(Kind::Int, "int");
        return int_;
    }
    double as_real() const {
        require(Kind::Real, "real");
        return real_;
    }
    // Accepts Int or Real; used where either numeric kind is sensible.
    double numeric() const {
        if (kind_ == Kind::Int) return static_cast<double>(int_);
        if (kind_ == Kind::Real) return real_;
        throw XcTypeError("literal is not numeric: " + to_string());
    }
    DeviceId as_device() const {
        require(Kind::Device, "device");
        return dev_;
    }
    const std::string& as_str() const {
        require(Kind::Str, "string");
        return str_;
    }
    const Literal& first() const {
        require(Kind::Pair, "pair");
        return items_[0];
    }
    const Literal& second() const {
        require(Kind::Pair, "pair");
        return items_[1];
    }
    const std::vector<Literal>& items() const {
        if (kind_ != Kind::Pair && kind_ != Kind::Tuple)
            throw XcTypeError("literal has no items: " + to_string());
        return items_;
    }
    const Literal& at(std::size_t i) const {
        const auto& v = items();
        if (i >= v.size()) throw XcTypeError("literal index out of range");
        return v[i];
    }

    // Three-way comparison over the total order.
    int compare(const Literal& o) const {
        if (kind_ != o.kind_) return kind_ < o.kind_ ? -1 : 1;
        switch (kind_) {
            case Kind::Bool: return bool_ == o.bool_ ? 0 : (bool_ < o.bool_ ? -1 : 1);
            case Kind::Int: return int_ == o.int_ ? 0 : (int_ < o.int_ ? -1 : 1);
            case Kind::Real: return real_ == o.real_ ? 0 : (real_ < o.real_ ? -1 : 1);
            case Kind::Device: return dev_ == o.dev_ ? 0 : (dev_ < o.dev_ ? -1 : 1);
            case Kind::Str: return str_.compare(o.str_);
            case Kind::Pair:
            case Kind::Tuple: {
                std::size_t n = std::min(items_.size(), o.items_.size());
                for (std::size_t i = 0; i < n; ++i) {
                    int c = items_[i].compare(o.items_[i]);
                    if (c != 0) return c;
                }
                if (items_.size() == o.items_.size()) return 0;
                return items_.size() < o.items_.size() ? -1 : 1;
            }
        }
        return 0;
    }

    friend bool operator==(const Literal& a, const Literal& b) { return a.compare(b) == 0; }
    friend bool operator!=(const Literal& a, const Literal& b) { return a.compare(b) != 0; }
    friend bool operator<(const Literal& a, const Literal& b) { return a.compare(b) < 0; }
    friend bool operator<=(const Literal& a, const Literal& b) { return a.compare(b) <= 0; }
    friend bool operator>(const Literal& a, const Literal& b) { return a.compare(b) > 0; }
    friend bool operator>=(const Literal& a, const Literal& b) { return a.compare(b) >= 0; }

    std::string to_string() const {
        switch (kind_) {
            case Kind::Bool: return bool_ ? "true" : "false";
            case Kind::Int: return std::to_string(int_);
            case Kind::Real: {
                char buf[40];
                std::snprintf(buf, sizeof buf, "%.9g", real_);
                return buf;
            }
            case Kind::Device: return "#" + std::to_string(dev_);
            case Kind::Str: return "\"" + str_ + "\"";
            case Kind::Pair:
            case Kind::Tuple: {
                std::string out = kind_ == Kind::Pair ? "(" : "[";
                for (std::size_t i = 0; i < items_.size(); ++i) {
                    if (i) out += ",";
                    out += items_[i].to_string();
                }
                out += kind_ == Kind::Pair ? ")" : "]";
                return out;
            }
        }
        return "?";
    }

private:
    void require(Kind k, const char* name) const {
        if (kind_ != k)
            throw XcTypeError("literal is not a " + std::string(name) + ": " + to_string());
    }

    Kind kind_;
    bool bool_ = false;
    std::int64_t int_ = 0;
    double real_ = 0.0;
    DeviceId dev_ = 0;
    std::string str_;
    std::vector<Literal> items_;
};

// Saturating integer infinity for hop counts and similar folds.
inline constexpr std::int64_t kInfInt = std::numeric_limits<std::int64_t>::max();

inline Literal lit_min(const Literal& a, const Literal& b) { return a < b ? a : b; }
inline Literal lit_max(const Literal& a, const Literal& b) { return a < b ? b : a; }

inline Literal lit_add(const Literal& a, const Literal& b) {
    if (a.is(Literal::Kind::Int) && b.is(Literal::Kind::Int)) {
        if (a.as_int() == kInfInt || b.as_int() == kInfInt) return Literal(kInfInt);
        return Literal(a.as_int() + b.as_int());
    }
    if (a.is(Literal::Kind::Real) && b.is(Literal::Kind::Real))
        return Literal(a.as_real() + b.as_real());
    throw XcTypeError("lit_add: kind mismatch between " + a.to_string() + " and " + b.to_string());
}

inline Literal lit_or(const Literal& a, const Literal& b) { return Literal(a.as_bool() || b.as_bool()); }
inline Literal lit_and(const Literal& a, const Literal& b) { return Literal(a.as_bool() && b.as_bool()); }

// Increment that saturates at the integer infinity sentinel.
inline Literal sat_inc(const Literal& v) {
    std::int64_t x = v.as_int();
    return Literal(x >= kInfInt ? kInfInt : x + 1);
}

}  // namespace xcs
