#pragma once

namespace freqbin {

// Single source of truth for unit conversions: wavelengths in nm,
// delays in ps, angular frequencies in rad/ps.
inline constexpr double kSpeedOfLightNmPerPs = 299792.458;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace freqbin
