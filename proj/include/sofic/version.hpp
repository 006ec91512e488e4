#pragma once

namespace sofic {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kSchema = "soficlab/1";

}  // namespace sofic
