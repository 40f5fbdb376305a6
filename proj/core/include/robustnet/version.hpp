#pragma once

namespace robustnet {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace robustnet
