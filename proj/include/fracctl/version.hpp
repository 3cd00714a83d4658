#pragma once

namespace fracctl {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace fracctl
