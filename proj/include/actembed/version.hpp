#pragma once

namespace actembed {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace actembed
