#pragma once

namespace sensing {

inline constexpr const char* kToolName = "specsense";
inline constexpr const char* kToolVersion = "1.0.0";

}  // namespace sensing
