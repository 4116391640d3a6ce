#pragma once

namespace veech {

inline constexpr const char* version_string = "0.3.0";

} // namespace veech
