#pragma once

namespace twistkit {
inline constexpr const char* kToolName = "twistkit";
inline constexpr const char* kVersion = "0.1.0";
}  // namespace twistkit
