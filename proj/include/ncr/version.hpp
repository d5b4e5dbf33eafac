#pragma once

namespace ncr {
inline constexpr const char* kVersion = "0.1.0";
}
