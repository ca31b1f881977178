#pragma once

namespace redmat {

inline constexpr const char* kVersion = "1.0.0";

} // namespace redmat
