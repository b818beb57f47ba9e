#pragma once

namespace cuegrid {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cuegrid
