#pragma once

namespace rgym {

// Bumped in lockstep with any binding built against this core.
inline constexpr const char* kVersion = "0.1.0";

}  // namespace rgym
