#pragma once

#include <string_view>

namespace slantkit {

#ifdef SLANTKIT_VERSION
inline constexpr std::string_view tool_version = SLANTKIT_VERSION;
#else
inline constexpr std::string_view tool_version = "0.1.0";
#endif

}  // namespace slantkit
