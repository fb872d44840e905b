#pragma once

namespace mqd {

inline constexpr const char* kToolName = "mqd";
inline constexpr const char* kToolVersion = "0.1.0";

} // namespace mqd
