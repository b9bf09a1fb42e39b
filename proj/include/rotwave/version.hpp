#pragma once

namespace rotwave {

inline constexpr const char* kToolName = "rotwave";
inline constexpr const char* kToolVersion = "1.0.0";

}  // namespace rotwave
