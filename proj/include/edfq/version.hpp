#pragma once

namespace edfq {
inline constexpr const char* kVersion = "0.1.0";
}
