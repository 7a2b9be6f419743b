#pragma once

namespace slipgrip {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace slipgrip
