#pragma once

namespace throwsense {

inline constexpr const char* kToolVersion = "throwsense/0.1.0";

} // namespace throwsense
