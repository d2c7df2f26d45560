// halfspace.hpp — thermal near-field spectra above a flat metallic half-space
//
// Cross-spectral densities are two-sided, S(w) = int dtau <E(t + tau) E(t)> e^{i w tau},
// in SI units: (V/m)^2 s for the electric field and T^2 s for the magnetic field.
// The observation point sits at height z above the surface z = 0; x and y lie in
// the surface plane.
//
// The exact path evaluates the fluctuation-dissipation form
//     S^{ij}(z, w) = 2 hbar / (1 - exp(-hbar w / kT)) * Im G^{ij}(z, z; w)
// with the reflected part of the half-space Green tensor written as integrals over
// the lateral wavenumber u. Only the field generated by the thermal currents in
// the metal is kept; the free-space (blackbody) term can be added on request.

#pragma once

#include <Eigen/Core>
#include <complex>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "nearfield/materials.hpp"

namespace nearfield {

enum class FieldKind { electric, magnetic };
enum class SpectrumPath { exact, asymptotic };

std::string_view to_string(FieldKind kind);
std::string_view to_string(SpectrumPath path);

struct HalfSpaceGeometry {
    double z{};  // height above the surface, m
    Material material;
    ThermalEnvironment env;
};

/// Throws DomainError unless z > 0.
HalfSpaceGeometry make_geometry(double z, Material material, ThermalEnvironment env);

struct SpectrumTensor {
    Eigen::Matrix3d components{Eigen::Matrix3d::Zero()};
    double omega{};
    FieldKind kind{FieldKind::electric};
    /// Set by the asymptotic formulas when z is not small compared to c / |omega|.
    bool outside_validity{false};

    std::string_view units() const;
    Eigen::Vector3d diagonal() const { return components.diagonal(); }
    double operator()(int i, int j) const { return components(i, j); }
};

using SpectrumProvider = std::function<SpectrumTensor(double omega)>;

struct FresnelPair {
    std::complex<double> r_s;
    std::complex<double> r_p;
};

/// Reflection coefficients of the half-space for lateral wavenumber u >= 0.
FresnelPair fresnel_coefficients(double u, double omega, std::complex<double> eps);

/// Diagonal of the near-field geometry tensors s^{ij} (electric) and s^{ab}
/// (magnetic). Both follow from the z << skin depth limit of the exact
/// integrals; test_halfspace re-derives them numerically.
inline const Eigen::Vector3d electric_geometry_tensor{0.5, 0.5, 1.0};
inline const Eigen::Vector3d magnetic_geometry_tensor{0.5, 0.5, 1.0};

struct ExactOptions {
    double tol{1e-6};
    bool include_free_space{false};
};

SpectrumTensor electric_spectrum_exact(const HalfSpaceGeometry& geom, double omega,
                                       const ExactOptions& opts = {});
SpectrumTensor magnetic_spectrum_exact(const HalfSpaceGeometry& geom, double omega,
                                       const ExactOptions& opts = {});

/// S_E^{ij} = Theta(w, T) rho / (4 pi z^3) * (s^{ij} + delta^{ij} z / delta(w))
SpectrumTensor electric_spectrum_asymptotic(const HalfSpaceGeometry& geom, double omega);

/// S_B^{ab} = Theta(w, T) s^{ab} / (16 pi eps0^2 c^4 rho z) * (1 + 2 z^3 / (3 delta^3))^-1
SpectrumTensor magnetic_spectrum_asymptotic(const HalfSpaceGeometry& geom, double omega);

SpectrumTensor spectrum(const HalfSpaceGeometry& geom, double omega, FieldKind kind,
                        SpectrumPath path, const ExactOptions& opts = {});

/// Free-space Planck spectrum of one Cartesian electric-field component.
double blackbody_spectrum(double omega, const ThermalEnvironment& env);
/// Same for the magnetic field, S_E / c^2.
double blackbody_magnetic_spectrum(double omega, const ThermalEnvironment& env);

/// Nyquist force spectrum q^2 kT R / z^2 of a lumped-circuit trap.
double johnson_noise_spectrum(double charge, double z, double resistance,
                              const ThermalEnvironment& env);

/// R_eff = 3 rho / (4 pi delta(w)).
double effective_resistance(const Material& material, double omega);

/// Normalised lateral correlation C^{ii}(s) = S^{ii}(z, s; w) / S^{ii}(z, 0; w) of the
/// field at two points at the same height, separated by s along x. Returns (xx, yy, zz).
Eigen::Vector3d lateral_correlation(const HalfSpaceGeometry& geom, double omega, FieldKind kind,
                                    double s, double tol = 1e-6);

/// Closed-form short-distance (z << skin depth) limit of lateral_correlation.
Eigen::Vector3d lateral_correlation_asymptotic(const HalfSpaceGeometry& geom, FieldKind kind,
                                               double s);

struct CorrelationCurve {
    std::vector<double> s_values;
    std::vector<Eigen::Vector3d> c_values;
};

CorrelationCurve lateral_correlation_curve(const HalfSpaceGeometry& geom, double omega,
                                           FieldKind kind, std::span<const double> s_values,
                                           SpectrumPath path, double tol = 1e-6);

SpectrumProvider exact_provider(HalfSpaceGeometry geom, FieldKind kind, ExactOptions opts = {});
SpectrumProvider asymptotic_provider(HalfSpaceGeometry geom, FieldKind kind);
/// Isotropic free-space spectrum for the given field kind.
SpectrumProvider blackbody_provider(ThermalEnvironment env, FieldKind kind);
/// Isotropic electric-field spectrum kT R / z^2 (the Nyquist formula divided by q^2).
SpectrumProvider johnson_provider(double z, double resistance, ThermalEnvironment env);

}  // namespace nearfield
