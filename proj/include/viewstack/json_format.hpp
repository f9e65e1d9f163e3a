#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace viewstack {

/// Compact JSON with sorted keys and floats printed with 6 significant digits.
/// Non-finite floats become null.
std::string canonical_dump(const nlohmann::json& j);

/// FNV-1a, 64 bit.
std::uint64_t fnv1a64(std::string_view bytes);

/// 16 lowercase hex digits.
std::string hex64(std::uint64_t v);

}  // namespace viewstack
