#pragma once

namespace stclust {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace stclust
