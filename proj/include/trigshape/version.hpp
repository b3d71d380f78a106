#pragma once

namespace trigshape {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace trigshape
