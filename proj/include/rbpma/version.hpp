#pragma once

namespace rbpma {

inline constexpr const char* version() { return "0.1.0"; }

}  // namespace rbpma
