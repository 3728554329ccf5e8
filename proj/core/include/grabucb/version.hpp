#pragma once

namespace grabucb {

inline constexpr const char* kVersion = "0.1.0";

} // namespace grabucb
