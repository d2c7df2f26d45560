// rates.cpp

#include "nearfield/rates.hpp"

#include <Eigen/Geometry>
#include <cmath>

#include "nearfield/constants.hpp"
#include "nearfield/errors.hpp"

namespace nearfield {

namespace c = constants;

namespace {

Eigen::Vector3d unit(const Eigen::Vector3d& v, const char* what) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw DomainError(std::string(what) + ": axis must be a finite non-zero vector");
    }
    return v / n;
}

void check_trap(const IonTrapSpec& trap) {
    if (!(trap.mass > 0.0)) throw DomainError("ion trap: mass must be positive");
    if (!(trap.omega_trap > 0.0)) throw DomainError("ion trap: trap frequency must be positive");
    if (std::abs(trap.axis.norm() - 1.0) > 1e-12) throw DomainError("ion trap: axis must be a unit vector");
}

}  // namespace

IonTrapSpec make_ion_trap(double mass, double charge, double omega_trap, Eigen::Vector3d axis,
                          HalfSpaceGeometry geometry) {
    IonTrapSpec trap{mass, charge, omega_trap, unit(axis, "ion trap"), std::move(geometry)};
    check_trap(trap);
    return trap;
}

SpinTrapSpec make_spin_trap(double mu, double larmor, HalfSpaceGeometry geometry,
                            Eigen::Vector3d quantization_axis) {
    if (!(mu > 0.0)) throw DomainError("spin trap: magnetic moment must be positive");
    if (!(larmor > 0.0)) throw DomainError("spin trap: Larmor frequency must be positive");
    return {mu, larmor, std::move(geometry), unit(quantization_axis, "spin trap")};
}

double ground_state_size(const IonTrapSpec& trap) {
    check_trap(trap);
    return std::sqrt(c::hbar / (trap.mass * trap.omega_trap));
}

double thermal_occupation(double omega, const ThermalEnvironment& env) {
    if (!(omega > 0.0)) throw DomainError("thermal_occupation: omega must be positive");
    return 1.0 / std::expm1(c::hbar * omega / (c::k_B * env.temperature));
}

RatePair heating_rates(const IonTrapSpec& trap, const SpectrumProvider& spectrum) {
    const double a = ground_state_size(trap);
    const double scale = std::pow(a * trap.charge / c::hbar, 2);
    auto project = [&](double omega) {
        const SpectrumTensor s = spectrum(omega);
        if (s.kind != FieldKind::electric) {
            throw DomainError("heating_rates: needs an electric-field spectrum");
        }
        return scale * trap.axis.dot(s.components * trap.axis);
    };
    return {project(trap.omega_trap), project(-trap.omega_trap)};
}

OscillatorState evolve_oscillator(const RatePair& rates, const OscillatorState& initial, double t,
                                  double omega_trap) {
    const double gp = rates.gamma_plus;
    const double gm = rates.gamma_minus;
    if (!(gp >= 0.0) || !(gm >= 0.0)) throw DomainError("evolve_oscillator: negative rate");
    if (!(t >= 0.0)) throw DomainError("evolve_oscillator: t must be non-negative");
    if (!(initial.rho00 >= 0.0 && initial.rho00 <= 1.0) || !(initial.mean_n >= 0.0)) {
        throw DomainError("evolve_oscillator: invalid initial state");
    }

    OscillatorState out;
    // d rho00/dt = -gm rho00 + gp (1 - rho00)
    const double total = gp + gm;
    if (total > 0.0) {
        const double steady = gp / total;
        out.rho00 = steady + (initial.rho00 - steady) * std::exp(-total * t);
    } else {
        out.rho00 = initial.rho00;
    }
    // d<n>/dt = -(gp - gm) <n> + gm
    const double relax = gp - gm;
    if (relax == 0.0) {
        out.mean_n = initial.mean_n + gm * t;
    } else {
        const double decay = std::exp(-relax * t);
        out.mean_n = initial.mean_n * decay - gm * std::expm1(-relax * t) / relax;
    }
    out.mean_b = initial.mean_b * std::polar(std::exp(-0.5 * relax * t), -omega_trap * t);
    return out;
}

Eigen::Vector3cd spin_half_matrix_element(double mu, const Eigen::Vector3d& axis) {
    const Eigen::Vector3d n = unit(axis, "spin_half_matrix_element");
    // any vector not parallel to n seeds the transverse frame
    const Eigen::Vector3d seed = std::abs(n.x()) < 0.9 ? Eigen::Vector3d::UnitX()
                                                       : Eigen::Vector3d::UnitY();
    const Eigen::Vector3d e1 = (seed - seed.dot(n) * n).normalized();
    const Eigen::Vector3d e2 = n.cross(e1);
    const std::complex<double> i{0.0, 1.0};
    return mu * (e1.cast<std::complex<double>>() - i * e2.cast<std::complex<double>>());
}

double spin_flip_rate(const SpinTrapSpec& spec, const SpectrumProvider& spectrum,
                      const Eigen::Vector3cd& matrix_element) {
    if (!(spec.larmor > 0.0)) throw DomainError("spin_flip_rate: Larmor frequency must be positive");
    const SpectrumTensor s = spectrum(spec.larmor);
    if (s.kind != FieldKind::magnetic) {
        throw DomainError("spin_flip_rate: needs a magnetic-field spectrum");
    }
    const std::complex<double> sum =
        matrix_element.transpose() * s.components.cast<std::complex<double>>() *
        matrix_element.conjugate();
    return sum.real() / (c::hbar * c::hbar);
}

double spin_flip_rate(const SpinTrapSpec& spec, const SpectrumProvider& spectrum) {
    return spin_flip_rate(spec, spectrum,
                          spin_half_matrix_element(spec.mu, spec.quantization_axis));
}

}  // namespace nearfield
