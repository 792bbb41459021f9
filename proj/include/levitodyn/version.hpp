#pragma once

namespace levitodyn {

inline constexpr const char* version = "0.1.0";

} // namespace levitodyn
