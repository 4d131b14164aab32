#pragma once

namespace noisebound {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kToolName = "noisebound";

}  // namespace noisebound
