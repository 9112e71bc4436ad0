#pragma once

namespace tl {

inline constexpr const char* kToolName = "tensorlight";
inline constexpr const char* kToolVersion = "1.0.0";

} // namespace tl
