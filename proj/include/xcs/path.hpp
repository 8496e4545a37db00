#pragma once

#include <cstdint>
#include <vector>

#include "xcs/literal.hpp"

namespace xcs {

// One call-site token on an alignment path. `index` is the occurrence
// counter within the enclosing frame; `arm` distinguishes branch arms; `key`
// carries the process key for process-scoped frames.
struct PathToken {
    enum class Tag : std::uint8_t { Exchange = 0, Branch = 1, Spawn = 2, Key = 3 };

    Tag tag = Tag::Exchange;
    std::uint32_t index = 0;
    std::uint32_t arm = 0;
    Literal key;

    static PathToken exchange(std::uint32_t index) { return {Tag::Exchange, index, 0, {}}; }
    static PathToken branch(std::uint32_t index, bool taken) {
        return {Tag::Branch, index, taken ? 1u : 0u, {}};
    }
    static PathToken spawn(std::uint32_t index) { return {Tag::Spawn, index, 0, {}}; }
    static PathToken for_key(Literal k) { return {Tag::Key, 0, 0, std::move(k)}; }

    int compare(const PathToken& o) const {
        if (tag != o.tag) return tag < o.tag ? -1 : 1;
        if (index != o.index) return index < o.index ? -1 : 1;
        if (arm != o.arm) return arm < o.arm ? -1 : 1;
        return key.compare(o.key);
    }

    friend bool operator==(const PathToken& a, const PathToken& b) { return a.compare(b) == 0; }
    friend bool operator!=(const PathToken& a, const PathToken& b) { return a.compare(b) != 0; }
    friend bool operator<(const PathToken& a, const PathToken& b) { return a.compare(b) < 0; }

    std::string to_string() const {
        switch (tag) {
            case Tag::Exchange: return "x" + std::to_string(index);
            case Tag::Branch: return "b" + std::to_string(index) + "." + std::to_string(arm);
            case Tag::Spawn: return "s" + std::to_string(index);
            case Tag::Key: return "k" + key.to_string();
        }
        return "?";
    }
};

// Two devices exchange data for a sub-expression iff their paths are equal.
using AlignmentPath = std::vector<PathToken>;

inline bool starts_with(const AlignmentPath& path, const AlignmentPath& prefix) {
    if (path.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i)
        if (path[i] != prefix[i]) return false;
    return true;
}

inline std::string path_to_string(const AlignmentPath& p) {
    std::string out = "/";
    for (const auto& t : p) out += t.to_string() + "/";
    return out;
}

}  // namespace xcs
