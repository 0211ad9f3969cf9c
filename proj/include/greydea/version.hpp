#pragma once

namespace greydea {

inline constexpr const char* kVersion = "0.1.0";

} // namespace greydea
