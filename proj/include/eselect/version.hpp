#pragma once

namespace eselect {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace eselect
