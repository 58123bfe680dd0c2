#pragma once

namespace backflow {

inline constexpr const char* kVersion = "0.3.0";

}  // namespace backflow
