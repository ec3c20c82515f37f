#pragma once

namespace thetac {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace thetac
