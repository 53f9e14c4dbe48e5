#pragma once

#include <string_view>

namespace gowerslab {

inline constexpr std::string_view k_library_name = "gowerslab";
inline constexpr std::string_view k_library_version = "0.1.0";

} // namespace gowerslab
