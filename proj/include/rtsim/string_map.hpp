#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>

namespace rtsim {

struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
};

/// Hashed string-keyed map with string_view lookups.
template <typename V>
using StringMap = std::unordered_map<std::string, V, StringHash, std::equal_to<>>;

}  // namespace rtsim
