// constants.hpp — CODATA 2018 physical constants in SI units

#pragma once

#include <numbers>

namespace nearfield::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double k_B = 1.380649e-23;            // J / K
inline constexpr double epsilon_0 = 8.8541878128e-12;  // F / m
inline constexpr double c = 299792458.0;               // m / s
inline constexpr double e = 1.602176634e-19;           // C
inline constexpr double amu = 1.66053906660e-27;       // kg
inline constexpr double mu_B = 9.2740100783e-24;       // J / T

}  // namespace nearfield::constants
