#pragma once

namespace deepread {

inline constexpr const char* kToolVersion = "0.1.0";

// Bumped whenever the on-disk schema changes; loaders reject newer files.
inline constexpr int kIndexFormatVersion = 1;
inline constexpr int kTrajectoryFormatVersion = 1;

}  // namespace deepread
