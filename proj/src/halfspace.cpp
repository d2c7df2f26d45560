// halfspace.cpp

#include "nearfield/halfspace.hpp"

#include <cmath>
#include <utility>

#include "nearfield/constants.hpp"
#include "nearfield/errors.hpp"
#include "nearfield/parallel.hpp"
#include "nearfield/quadrature.hpp"

namespace nearfield {

namespace c = constants;
using cplx = std::complex<double>;

std::string_view to_string(FieldKind kind) {
    return kind == FieldKind::electric ? "electric" : "magnetic";
}

std::string_view to_string(SpectrumPath path) {
    return path == SpectrumPath::exact ? "exact" : "asymptotic";
}

std::string_view SpectrumTensor::units() const {
    return kind == FieldKind::electric ? "V^2 m^-2 s" : "T^2 s";
}

HalfSpaceGeometry make_geometry(double z, Material material, ThermalEnvironment env) {
    if (!(z > 0.0) || !std::isfinite(z)) {
        throw DomainError("observation height z must be positive");
    }
    return HalfSpaceGeometry{z, std::move(material), env};
}

namespace {

// Reflection coefficients for a given longitudinal wavenumber kz (Im kz >= 0) and
// u^2 = k^2 - kz^2. Both are written without the differences kz - kz' and
// eps kz - kz', which cancel catastrophically for a good conductor.
FresnelPair reflection(cplx eps, double k2, cplx kz, double u2) {
    cplx kzm = std::sqrt((eps - 1.0) * k2 + kz * kz);
    if (kzm.imag() < 0.0) {
        kzm = -kzm;
    }
    const cplx ds = kz + kzm;
    const cplx dp = eps * kz + kzm;
    const cplx r_s = k2 * (1.0 - eps) / (ds * ds);
    const cplx r_p = (eps - 1.0) * (eps * k2 - (eps + 1.0) * u2) / (dp * dp);
    return {r_s, r_p};
}

// Coefficients entering the reflected Green tensor. For the electric field the
// k^2 term carries r_s and the kz^2 term carries r_p; the magnetic field swaps them.
struct Coefficients {
    cplx a;  // multiplies k^2
    cplx b;  // multiplies kz^2 and u^2
};

Coefficients coefficients(FieldKind kind, cplx eps, double k2, cplx kz, double u2) {
    const auto r = reflection(eps, k2, kz, u2);
    return kind == FieldKind::electric ? Coefficients{r.r_s, r.r_p} : Coefficients{r.r_p, r.r_s};
}

double green_prefactor(FieldKind kind) {
    return kind == FieldKind::electric ? 1.0 / c::epsilon_0
                                       : 1.0 / (c::epsilon_0 * c::c * c::c);
}

// Im G^{xx} and Im G^{zz} of the reflected Green tensor at coincident points, w > 0.
//   G_xx = i/(8 pi) int du u/kz (k^2 a - kz^2 b) e^{2 i kz z}
//   G_zz = i/(4 pi) int du u^3/kz b e^{2 i kz z}
// The propagating range u < k is integrated in kz, the evanescent range in
// kappa = -i kz, which removes the 1/kz endpoint singularity.
std::pair<double, double> reflected_green(const HalfSpaceGeometry& geom, double omega,
                                          FieldKind kind, double tol) {
    const double z = geom.z;
    const double k = omega / c::c;
    const double k2 = k * k;
    const cplx eps = dielectric_function(geom.material, omega);
    const double delta = skin_depth(geom.material, omega);

    auto ev_xx = [&](double kappa) {
        const auto co = coefficients(kind, eps, k2, cplx(0.0, kappa), k2 + kappa * kappa);
        return (k2 * co.a + kappa * kappa * co.b).imag() * std::exp(-2.0 * kappa * z);
    };
    auto ev_zz = [&](double kappa) {
        const double u2 = k2 + kappa * kappa;
        const auto co = coefficients(kind, eps, k2, cplx(0.0, kappa), u2);
        return (u2 * co.b).imag() * std::exp(-2.0 * kappa * z);
    };
    auto pr_xx = [&](double kz) {
        const auto co = coefficients(kind, eps, k2, cplx(kz, 0.0), k2 - kz * kz);
        return ((k2 * co.a - kz * kz * co.b) * std::polar(1.0, 2.0 * kz * z)).real();
    };
    auto pr_zz = [&](double kz) {
        const double u2 = k2 - kz * kz;
        const auto co = coefficients(kind, eps, k2, cplx(kz, 0.0), u2);
        return (u2 * co.b * std::polar(1.0, 2.0 * kz * z)).real();
    };

    quadrature::Options ev_opts;
    ev_opts.rel_tol = tol;
    ev_opts.breakpoints = {1.0 / delta, k};
    const double decay = 1.0 / (2.0 * z);
    const double exx = quadrature::integrate_semi_infinite(ev_xx, decay, ev_opts).value;
    const double ezz = quadrature::integrate_semi_infinite(ev_zz, decay, ev_opts).value;

    quadrature::Options pr_opts;
    pr_opts.rel_tol = tol;
    pr_opts.abs_tol = 0.1 * tol * std::abs(exx);
    const double pxx = quadrature::integrate_finite(pr_xx, 0.0, k, pr_opts).value;
    pr_opts.abs_tol = 0.1 * tol * std::abs(ezz);
    const double pzz = quadrature::integrate_finite(pr_zz, 0.0, k, pr_opts).value;

    const double pref = green_prefactor(kind);
    return {pref * (exx + pxx) / (8.0 * c::pi), pref * (ezz + pzz) / (4.0 * c::pi)};
}

SpectrumTensor exact_spectrum(const HalfSpaceGeometry& geom, double omega, FieldKind kind,
                              const ExactOptions& opts) {
    if (omega == 0.0) {
        throw DomainError("exact spectrum: omega = 0");
    }
    const double w = std::abs(omega);
    auto [gxx, gzz] = reflected_green(geom, w, kind, opts.tol);
    if (opts.include_free_space) {
        const double k = w / c::c;
        const double free = green_prefactor(kind) * k * k * k / (6.0 * c::pi);
        gxx += free;
        gzz += free;
    }
    // 2 hbar Im G(w) / (1 - e^{-hbar w/kT}) with Im G odd in w
    const double thermal = 2.0 * planck_factor(omega, geom.env) / w;
    SpectrumTensor out;
    out.omega = omega;
    out.kind = kind;
    out.components.diagonal() << thermal * gxx, thermal * gxx, thermal * gzz;
    return out;
}

bool outside_near_field(double z, double omega) { return z * std::abs(omega) / c::c > 0.1; }

}  // namespace

FresnelPair fresnel_coefficients(double u, double omega, std::complex<double> eps) {
    if (u < 0.0) {
        throw DomainError("fresnel_coefficients: u must be non-negative");
    }
    const double k = std::abs(omega) / c::c;
    const double k2 = k * k;
    const double u2 = u * u;
    cplx kz = std::sqrt(cplx(k2 - u2, 0.0));
    if (kz.imag() < 0.0) {
        kz = -kz;
    }
    return reflection(eps, k2, kz, u2);
}

SpectrumTensor electric_spectrum_exact(const HalfSpaceGeometry& geom, double omega,
                                       const ExactOptions& opts) {
    return exact_spectrum(geom, omega, FieldKind::electric, opts);
}

SpectrumTensor magnetic_spectrum_exact(const HalfSpaceGeometry& geom, double omega,
                                       const ExactOptions& opts) {
    return exact_spectrum(geom, omega, FieldKind::magnetic, opts);
}

SpectrumTensor electric_spectrum_asymptotic(const HalfSpaceGeometry& geom, double omega) {
    const double z = geom.z;
    const double rho = geom.material.rho;
    const double prefactor =
        planck_factor(omega, geom.env) * rho / (4.0 * c::pi * z * z * z);
    const double skin = z / skin_depth(geom.material, omega);
    SpectrumTensor out;
    out.omega = omega;
    out.kind = FieldKind::electric;
    out.outside_validity = outside_near_field(z, omega);
    out.components.diagonal() = prefactor * (electric_geometry_tensor.array() + skin).matrix();
    return out;
}

SpectrumTensor magnetic_spectrum_asymptotic(const HalfSpaceGeometry& geom, double omega) {
    const double z = geom.z;
    const double rho = geom.material.rho;
    const double e2c4 = c::epsilon_0 * c::epsilon_0 * std::pow(c::c, 4);
    const double ratio = z / skin_depth(geom.material, omega);
    const double crossover = 1.0 / (1.0 + 2.0 * ratio * ratio * ratio / 3.0);
    const double prefactor =
        planck_factor(omega, geom.env) / (16.0 * c::pi * e2c4 * rho * z) * crossover;
    SpectrumTensor out;
    out.omega = omega;
    out.kind = FieldKind::magnetic;
    out.outside_validity = outside_near_field(z, omega);
    out.components.diagonal() = prefactor * magnetic_geometry_tensor;
    return out;
}

SpectrumTensor spectrum(const HalfSpaceGeometry& geom, double omega, FieldKind kind,
                        SpectrumPath path, const ExactOptions& opts) {
    if (path == SpectrumPath::exact) {
        return exact_spectrum(geom, omega, kind, opts);
    }
    return kind == FieldKind::electric ? electric_spectrum_asymptotic(geom, omega)
                                       : magnetic_spectrum_asymptotic(geom, omega);
}

double blackbody_spectrum(double omega, const ThermalEnvironment& env) {
    return planck_factor(omega, env) * omega * omega /
           (3.0 * c::pi * c::epsilon_0 * c::c * c::c * c::c);
}

double blackbody_magnetic_spectrum(double omega, const ThermalEnvironment& env) {
    return blackbody_spectrum(omega, env) / (c::c * c::c);
}

double johnson_noise_spectrum(double charge, double z, double resistance,
                              const ThermalEnvironment& env) {
    if (!(z > 0.0)) {
        throw DomainError("johnson_noise_spectrum: z must be positive");
    }
    if (resistance < 0.0) {
        throw DomainError("johnson_noise_spectrum: resistance must be non-negative");
    }
    return charge * charge * c::k_B * env.temperature * resistance / (z * z);
}

double effective_resistance(const Material& material, double omega) {
    return 3.0 * material.rho / (4.0 * c::pi * skin_depth(material, omega));
}

namespace {

// Unnormalised two-point spectra (xx, yy, zz) for separation s along x:
//   xx = R0 + R2, yy = R0 - R2, zz = Rz
//   R0 = int (k^2 a - kz^2 b) J0,  R2 = int (k^2 a + kz^2 b) J2,  Rz = int u^2 b J0
Eigen::Vector3d two_point_raw(const HalfSpaceGeometry& geom, double omega, FieldKind kind,
                              double s, double tol) {
    const double z = geom.z;
    const double w = std::abs(omega);
    const double k = w / c::c;
    const double k2 = k * k;
    const cplx eps = dielectric_function(geom.material, w);

    enum class Term { r0, r2, rz };
    auto coefficient = [&](Term term, cplx kz, double u2) {
        const auto co = coefficients(kind, eps, k2, kz, u2);
        const cplx kz2 = kz * kz;
        switch (term) {
            case Term::r0: return k2 * co.a - kz2 * co.b;
            case Term::r2: return k2 * co.a + kz2 * co.b;
            default: return u2 * co.b;
        }
    };
    auto integrate = [&](Term term, int order) {
        // propagating, in kz
        auto pr = [&](double kz) {
            const double u2 = k2 - kz * kz;
            const double u = std::sqrt(std::max(u2, 0.0));
            return (coefficient(term, cplx(kz, 0.0), u2) * std::polar(1.0, 2.0 * kz * z)).real() *
                   std::cyl_bessel_j(static_cast<double>(order), u * s);
        };
        // evanescent head, in kappa, up to kappa = k
        auto head = [&](double kappa) {
            const double u2 = k2 + kappa * kappa;
            return coefficient(term, cplx(0.0, kappa), u2).imag() * std::exp(-2.0 * kappa * z) *
                   std::cyl_bessel_j(static_cast<double>(order), std::sqrt(u2) * s);
        };
        // evanescent remainder, in u, with du = (kappa / u) dkappa
        auto envelope = [&](double u) {
            const double kappa = std::sqrt(u * u - k2);
            return (u / kappa) * coefficient(term, cplx(0.0, kappa), u * u).imag() *
                   std::exp(-2.0 * kappa * z);
        };
        const double lower = std::sqrt(2.0) * k;
        const double main = quadrature::integrate_bessel_weighted(envelope, order, s,
                                                                  1.0 / (2.0 * z), tol, lower)
                                .value;
        quadrature::Options opts;
        opts.rel_tol = tol;
        opts.abs_tol = 0.1 * tol * std::abs(main);
        const double h = quadrature::integrate_finite(head, 0.0, k, opts).value;
        const double p = quadrature::integrate_finite(pr, 0.0, k, opts).value;
        return main + h + p;
    };
    const double r0 = integrate(Term::r0, 0);
    const double r2 = s == 0.0 ? 0.0 : integrate(Term::r2, 2);
    const double rz = integrate(Term::rz, 0);
    return {r0 + r2, r0 - r2, rz};
}

}  // namespace

Eigen::Vector3d lateral_correlation(const HalfSpaceGeometry& geom, double omega, FieldKind kind,
                                    double s, double tol) {
    if (s < 0.0) {
        throw DomainError("lateral_correlation: s must be non-negative");
    }
    if (omega == 0.0) {
        throw DomainError("lateral_correlation: omega = 0");
    }
    const Eigen::Vector3d origin = two_point_raw(geom, omega, kind, 0.0, tol);
    if (s == 0.0) {
        return Eigen::Vector3d::Ones();
    }
    return two_point_raw(geom, omega, kind, s, tol).cwiseQuotient(origin);
}

Eigen::Vector3d lateral_correlation_asymptotic(const HalfSpaceGeometry& geom, FieldKind kind,
                                               double s) {
    if (s < 0.0) {
        throw DomainError("lateral_correlation_asymptotic: s must be non-negative");
    }
    if (s == 0.0) {
        return Eigen::Vector3d::Ones();
    }
    // Laplace transforms of J_n at a = 2 z: I0 = 1/R, I2 = (R - a)^2 / (s^2 R)
    const double a = 2.0 * geom.z;
    const double r = std::hypot(a, s);
    if (kind == FieldKind::magnetic) {
        const double i0 = 1.0 / r;
        const double i2 = (r - a) * (r - a) / (s * s * r);
        return {a * (i0 - i2), a * (i0 + i2), a * i0};
    }
    // electric: second derivatives in a of the same transforms
    const double a3 = a * a * a;
    const double r5 = std::pow(r, 5);
    return {a3 * (a * a - 2.0 * s * s) / r5, a3 / (r * r * r), a3 * (2.0 * a * a - s * s) / (2.0 * r5)};
}

CorrelationCurve lateral_correlation_curve(const HalfSpaceGeometry& geom, double omega,
                                           FieldKind kind, std::span<const double> s_values,
                                           SpectrumPath path, double tol) {
    CorrelationCurve curve;
    curve.s_values.assign(s_values.begin(), s_values.end());
    curve.c_values.assign(s_values.size(), Eigen::Vector3d::Zero());
    if (path == SpectrumPath::asymptotic) {
        for (std::size_t i = 0; i < s_values.size(); ++i) {
            curve.c_values[i] = lateral_correlation_asymptotic(geom, kind, s_values[i]);
        }
        return curve;
    }
    const Eigen::Vector3d origin = two_point_raw(geom, omega, kind, 0.0, tol);
    parallel_for(s_values.size(), [&](std::size_t i) {
        if (s_values[i] < 0.0) {
            throw DomainError("lateral_correlation_curve: s must be non-negative");
        }
        curve.c_values[i] = s_values[i] == 0.0
                                ? Eigen::Vector3d::Ones()
                                : two_point_raw(geom, omega, kind, s_values[i], tol)
                                      .cwiseQuotient(origin)
                                      .eval();
    });
    return curve;
}

SpectrumProvider exact_provider(HalfSpaceGeometry geom, FieldKind kind, ExactOptions opts) {
    return [geom = std::move(geom), kind, opts](double omega) {
        return exact_spectrum(geom, omega, kind, opts);
    };
}

SpectrumProvider asymptotic_provider(HalfSpaceGeometry geom, FieldKind kind) {
    return [geom = std::move(geom), kind](double omega) {
        return spectrum(geom, omega, kind, SpectrumPath::asymptotic);
    };
}

SpectrumProvider blackbody_provider(ThermalEnvironment env, FieldKind kind) {
    return [env, kind](double omega) {
        SpectrumTensor out;
        out.omega = omega;
        out.kind = kind;
        const double value = kind == FieldKind::electric ? blackbody_spectrum(omega, env)
                                                         : blackbody_magnetic_spectrum(omega, env);
        out.components = value * Eigen::Matrix3d::Identity();
        return out;
    };
}

SpectrumProvider johnson_provider(double z, double resistance, ThermalEnvironment env) {
    // validate eagerly
    johnson_noise_spectrum(1.0, z, resistance, env);
    return [z, resistance, env](double omega) {
        SpectrumTensor out;
        out.omega = omega;
        out.kind = FieldKind::electric;
        out.components = johnson_noise_spectrum(1.0, z, resistance, env) *
                         Eigen::Matrix3d::Identity();
        return out;
    };
}

}  // namespace nearfield
