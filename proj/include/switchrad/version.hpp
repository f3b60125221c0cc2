#pragma once

namespace switchrad {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace switchrad
