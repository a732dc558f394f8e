#pragma once

namespace wclt {

inline constexpr const char* kToolVersion = "0.1.0";

} // namespace wclt
