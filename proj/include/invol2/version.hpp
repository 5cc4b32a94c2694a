#pragma once

namespace invol2 {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace invol2
