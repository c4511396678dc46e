#pragma once

namespace csdas {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace csdas
