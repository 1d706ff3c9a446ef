#pragma once

namespace sloganaudit {

inline constexpr const char* kVersion = "0.1.0";

} // namespace sloganaudit
