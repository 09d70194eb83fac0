#pragma once

namespace fockpres {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fockpres
