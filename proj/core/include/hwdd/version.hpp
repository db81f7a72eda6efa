#pragma once

namespace hwdd {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace hwdd
