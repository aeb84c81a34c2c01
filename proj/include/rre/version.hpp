#pragma once

namespace rre {

inline constexpr const char* kToolkitName = "rre";
inline constexpr const char* kVersion = "1.0.0";

}  // namespace rre
