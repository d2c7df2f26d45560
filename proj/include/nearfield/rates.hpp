// rates.hpp — trapped-ion heating and spin-flip loss rates from field spectra
//
// Rates are obtained in second-order perturbation theory from any SpectrumProvider.
// With the two-sided convention S(w) = int dtau <F(t + tau) F(t)> e^{i w tau},
// the rate for absorbing a trap quantum comes from S(-Omega), so gamma_minus is the
// heating rate out of the ground state and gamma_plus >= gamma_minus in equilibrium.

#pragma once

#include <Eigen/Core>
#include <complex>

#include "nearfield/halfspace.hpp"

namespace nearfield {

struct IonTrapSpec {
    double mass{};        // kg
    double charge{};      // C
    double omega_trap{};  // rad/s
    Eigen::Vector3d axis{0.0, 0.0, 1.0};
    HalfSpaceGeometry geometry;
};

/// Throws DomainError unless mass > 0, omega_trap > 0 and the axis is non-zero.
/// The axis is normalised.
IonTrapSpec make_ion_trap(double mass, double charge, double omega_trap, Eigen::Vector3d axis,
                          HalfSpaceGeometry geometry);

struct RatePair {
    double gamma_plus{};   // s^-1, from S(+Omega)
    double gamma_minus{};  // s^-1, from S(-Omega)

    /// Gamma_{0->1}
    double ground_state_heating() const { return gamma_minus; }
};

struct OscillatorState {
    double rho00{1.0};
    double mean_n{0.0};
    std::complex<double> mean_b{0.0, 0.0};
};

struct SpinTrapSpec {
    double mu{};      // J/T
    double larmor{};  // rad/s
    HalfSpaceGeometry geometry;
    Eigen::Vector3d quantization_axis{0.0, 0.0, 1.0};
};

SpinTrapSpec make_spin_trap(double mu, double larmor, HalfSpaceGeometry geometry,
                            Eigen::Vector3d quantization_axis = {0.0, 0.0, 1.0});

/// a = sqrt(hbar / (M Omega))
double ground_state_size(const IonTrapSpec& trap);

/// 1 / (exp(hbar Omega / kT) - 1)
double thermal_occupation(double omega, const ThermalEnvironment& env);

/// gamma_pm = (a q / hbar)^2 n.S_E(+-Omega).n for an electric-field provider.
RatePair heating_rates(const IonTrapSpec& trap, const SpectrumProvider& spectrum);

/// Closed-form solution of the rate equations without cooling. rho00 is evolved in
/// the two-level truncation (rho11 = 1 - rho00). `omega_trap` only sets the phase of
/// <b>; pass 0 to work in the frame rotating with the trap.
OscillatorState evolve_oscillator(const RatePair& rates, const OscillatorState& initial, double t,
                                  double omega_trap = 0.0);

/// Matrix element <i| mu_alpha |f> of mu sigma between the spin-1/2 states along the
/// quantization axis: mu (e1 - i e2) with (e1, e2, axis) right-handed.
Eigen::Vector3cd spin_half_matrix_element(double mu, const Eigen::Vector3d& axis);

/// Gamma = (1/hbar^2) sum m_a m_b^* S_B^{ab}(omega_L) for an arbitrary matrix element m.
double spin_flip_rate(const SpinTrapSpec& spec, const SpectrumProvider& spectrum,
                      const Eigen::Vector3cd& matrix_element);

/// Spin-1/2 rate, (mu / hbar)^2 (S_B^{11} + S_B^{22}) with 1, 2 transverse to the axis.
double spin_flip_rate(const SpinTrapSpec& spec, const SpectrumProvider& spectrum);

}  // namespace nearfield
