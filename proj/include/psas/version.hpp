#pragma once

namespace psas {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace psas
