#pragma once

namespace aggfit {

inline constexpr const char* kVersion = "aggfit 0.1.0";

}  // namespace aggfit
