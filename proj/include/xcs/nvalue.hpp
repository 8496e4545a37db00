#pragma once

#include <map>
#include <utility>

#include "xcs/literal.hpp"

namespace xcs {

// Neighbouring value: a default literal plus per-device entries. A plain
// local value is an NValue with no entries.
class NValue {
public:
    NValue() = default;
    NValue(Literal dflt) : default_(std::move(dflt)) {}
    NValue(bool v) : default_(v) {}
    NValue(int v) : default_(v) {}
    NValue(long long v) : default_(v) {}
    NValue(double v) : default_(v) {}
    NValue(const char* v) : default_(v) {}

    const Literal& dflt() const { return default_; }

    // Entry for `d`, falling back to the default.
    const Literal& get(DeviceId d) const {
        auto it = entries_.find(d);
        return it == entries_.end() ? default_ : it->second;
    }

    bool has(DeviceId d) const { return entries_.count(d) != 0; }

    void set(DeviceId d, Literal v) { entries_[d] = std::move(v); }
    void erase(DeviceId d) { entries_.erase(d); }

    const std::map<DeviceId, Literal>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool local() const { return entries_.empty(); }

    friend bool operator==(const NValue& a, const NValue& b) {
        return a.default_ == b.default_ && a.entries_ == b.entries_;
    }
    friend bool operator!=(const NValue& a, const NValue& b) { return !(a == b); }

    std::string to_string() const {
        std::string out = default_.to_string() + "[";
        bool first = true;
        for (const auto& [d, v] : entries_) {
            if (!first) out += ",";
            first = false;
            out += std::to_string(d) + ":" + v.to_string();
        }
        return out + "]";
    }

private:
    Literal default_;
    std::map<DeviceId, Literal> entries_;
};

}  // namespace xcs
