#pragma once

namespace meanvort {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace meanvort
