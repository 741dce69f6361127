#pragma once

namespace rpglite {

inline constexpr const char* kToolName = "rpglite";
inline constexpr const char* kVersion = "1.0.0";

}  // namespace rpglite
