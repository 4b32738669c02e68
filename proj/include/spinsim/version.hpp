#pragma once

namespace spinsim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace spinsim
