#pragma once

namespace noether {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace noether
