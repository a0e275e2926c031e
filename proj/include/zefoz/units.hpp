#pragma once

#include <string>

namespace zefoz {

/// Bohr magneton divided by Planck's constant, Hz/T.
inline constexpr double kBohrMagnetonHzPerT = 13.996245e9;

/// Bohr magneton in J/T, used for dipolar field estimates.
inline constexpr double kBohrMagnetonJPerT = 9.2740100783e-24;

/// mu_0 / 4pi in SI.
inline constexpr double kMu0Over4Pi = 1e-7;

inline constexpr double kPi = 3.14159265358979323846;

/// Parses a number with an explicit unit suffix ("2496.55 MHz", "-155 uT",
/// "10.3 ms", "0.44 nm", "2.095 MHz/T") and returns the value in SI base
/// units (Hz, T, s, m, Hz/T). Dimensionless values may omit the unit.
/// Throws std::invalid_argument on unknown units or malformed input.
double parse_quantity(const std::string& text, const std::string& dimension);

}  // namespace zefoz
