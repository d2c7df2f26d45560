// test_halfspace.cpp

#include <cmath>
#include <vector>

#include "doctest.h"
#include "nearfield/constants.hpp"
#include "nearfield/errors.hpp"
#include "nearfield/halfspace.hpp"

using namespace nearfield;
namespace c = nearfield::constants;

namespace {

constexpr double two_pi = 2.0 * c::pi;
constexpr double mhz = two_pi * 1e6;

HalfSpaceGeometry at(double z, double rho = 1.7e-8, double temperature = 300.0) {
    return make_geometry(z, make_material("test", rho), make_environment(temperature));
}

double log_slope(double y1, double y2, double x1, double x2) {
    return std::log(y2 / y1) / std::log(x2 / x1);
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("fresnel coefficients: limits") {
    const double w = mhz;
    const double k = w / c::c;
    for (double u : {0.0, 0.5 * k, 3.0 * k, 1e4 * k}) {
        const auto none = fresnel_coefficients(u, w, {1.0, 0.0});
        CHECK(std::abs(none.r_s) < 1e-15);
        CHECK(std::abs(none.r_p) < 1e-15);

        const auto metal = fresnel_coefficients(u, w, {1.0, 1e24});
        CHECK(std::abs(metal.r_s + 1.0) < 1e-5);
        CHECK(std::abs(metal.r_p - 1.0) < 1e-5);
    }
    const auto normal = fresnel_coefficients(0.0, w, {4.0, 0.0});
    CHECK(normal.r_p.real() == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(normal.r_s.real() == doctest::Approx(-1.0 / 3.0).epsilon(1e-13));
    CHECK(std::abs(normal.r_p.imag()) < 1e-15);
}

TEST_CASE("fresnel coefficients agree with the textbook form") {
    const double w = 30 * mhz;
    const double k = w / c::c;
    const std::complex<double> eps{1.0, 3.5e10};
    for (double u : {0.1 * k, 0.99 * k, 2.0 * k, 1e3 * k, 1e6 * k}) {
        const auto kz = std::sqrt(std::complex<double>(k * k - u * u));
        const auto kzm = std::sqrt(eps * k * k - u * u);
        const auto rs = (kz - kzm) / (kz + kzm);
        const auto rp = (eps * kz - kzm) / (eps * kz + kzm);
        const auto r = fresnel_coefficients(u, w, eps);
        CHECK(std::abs(r.r_s - rs) < 1e-9 * std::abs(rs) + 1e-15);
        CHECK(std::abs(r.r_p - rp) < 1e-9 * std::abs(rp) + 1e-15);
    }
}

TEST_CASE("geometry tensors re-derived from the extreme near field") {
    const double w = mhz;
    const double delta = skin_depth(copper(), w);
    const double z = 1e-4 * delta;
    const auto g = at(z);
    const double theta = planck_factor(w, g.env);
    const double rho = g.material.rho;

    const Eigen::Vector3d e = electric_spectrum_exact(g, w, {1e-9}).diagonal();
    const Eigen::Vector3d s_e = e * 4.0 * c::pi * z * z * z / (theta * rho) -
                                Eigen::Vector3d::Constant(z / delta);
    const Eigen::Vector3d b = magnetic_spectrum_exact(g, w, {1e-9}).diagonal();
    const double eps0c2 = c::epsilon_0 * c::c * c::c;
    const Eigen::Vector3d s_b =
        b * 16.0 * c::pi * eps0c2 * eps0c2 * rho * z / theta * (1.0 + 2.0 * std::pow(z / delta, 3) / 3.0);
    for (int i = 0; i < 3; ++i) {
        CHECK(s_e[i] == doctest::Approx(electric_geometry_tensor[i]).epsilon(2e-3));
        CHECK(s_b[i] == doctest::Approx(magnetic_geometry_tensor[i]).epsilon(2e-3));
    }
}

TEST_CASE("exact electric spectrum scaling regimes") {
    const double w = mhz;
    const double delta = skin_depth(copper(), w);
    SUBCASE("z << delta: 1/z^3") {
        const double z = 1e-3 * delta;
        const Eigen::Vector3d r = electric_spectrum_exact(at(z), w).diagonal().cwiseQuotient(
            electric_spectrum_exact(at(2 * z), w).diagonal());
        for (int i = 0; i < 3; ++i) CHECK(r[i] == doctest::Approx(8.0).epsilon(0.02));
    }
    SUBCASE("delta << z << lambda: 1/z^2") {
        const double z = 100 * delta;
        const Eigen::Vector3d r = electric_spectrum_exact(at(z), w).diagonal().cwiseQuotient(
            electric_spectrum_exact(at(2 * z), w).diagonal());
        for (int i = 0; i < 3; ++i) CHECK(r[i] == doctest::Approx(4.0).epsilon(0.05));
    }
}

TEST_CASE("exact magnetic spectrum scaling regimes") {
    const double w = mhz;
    const double delta = skin_depth(copper(), w);
    const double z1 = 1e-3 * delta;
    const Eigen::Vector3d r = magnetic_spectrum_exact(at(z1), w).diagonal().cwiseQuotient(
        magnetic_spectrum_exact(at(2 * z1), w).diagonal());
    for (int i = 0; i < 3; ++i) CHECK(r[i] == doctest::Approx(2.0).epsilon(0.02));

    const double z2 = 100 * delta;
    const auto far1 = magnetic_spectrum_exact(at(z2), w).diagonal();
    const auto far2 = magnetic_spectrum_exact(at(2 * z2), w).diagonal();
    for (int i = 0; i < 3; ++i) CHECK(log_slope(far1[i], far2[i], z2, 2 * z2) == doctest::Approx(-4.0).epsilon(0.03));
}

TEST_CASE("exact and asymptotic paths agree in the extreme near field") {
    const double w = mhz;
    const double delta = skin_depth(copper(), w);
    for (double zr : {1e-3, 1e-2}) {
        const auto g = at(zr * delta);
        const auto e = electric_spectrum_exact(g, w).diagonal();
        const auto ea = electric_spectrum_asymptotic(g, w).diagonal();
        const auto b = magnetic_spectrum_exact(g, w).diagonal();
        const auto ba = magnetic_spectrum_asymptotic(g, w).diagonal();
        for (int i = 0; i < 3; ++i) {
            CHECK(rel(ea[i], e[i]) < 0.05);
            CHECK(rel(ba[i], b[i]) < 0.05);
        }
    }
    // spec examples: 1 um at 1 MHz (electric) and 30 MHz (magnetic)
    const auto g = at(1e-6);
    CHECK(rel(electric_spectrum_asymptotic(g, w)(2, 2), electric_spectrum_exact(g, w)(2, 2)) < 0.25);
    CHECK(rel(magnetic_spectrum_asymptotic(g, 30 * w)(2, 2),
              magnetic_spectrum_exact(g, 30 * w)(2, 2)) < 0.25);
}

TEST_CASE("asymptotic power laws") {
    const double w = mhz;
    const double delta = skin_depth(copper(), w);
    auto e_zz = [&](double z) { return electric_spectrum_asymptotic(at(z), w)(2, 2); };
    auto b_zz = [&](double z) { return magnetic_spectrum_asymptotic(at(z), w)(2, 2); };
    CHECK(log_slope(e_zz(1e-7), e_zz(1e-6), 1e-7, 1e-6) == doctest::Approx(-3.0).epsilon(0.05 / 3));
    CHECK(log_slope(e_zz(100 * delta), e_zz(1000 * delta), 100 * delta, 1000 * delta) ==
          doctest::Approx(-2.0).epsilon(0.05));
    CHECK(log_slope(b_zz(1e-3 * delta), b_zz(1e-1 * delta), 1e-3 * delta, 1e-1 * delta) ==
          doctest::Approx(-1.0).epsilon(0.05));
    CHECK(log_slope(b_zz(10 * delta), b_zz(100 * delta), 10 * delta, 100 * delta) ==
          doctest::Approx(-4.0).epsilon(0.025));
}

TEST_CASE("KMS identity on both paths") {
    const auto env = make_environment(300.0);
    for (double z : {1e-7, 1e-6, 1e-5}) {
        for (double w : {mhz, 100 * mhz, two_pi * 1e12}) {
            const auto g = at(z);
            const double kms = std::exp(c::hbar * w / (c::k_B * env.temperature));
            for (auto kind : {FieldKind::electric, FieldKind::magnetic}) {
                const auto a = spectrum(g, w, kind, SpectrumPath::asymptotic).diagonal();
                const auto am = spectrum(g, -w, kind, SpectrumPath::asymptotic).diagonal();
                const auto e = spectrum(g, w, kind, SpectrumPath::exact).diagonal();
                const auto em = spectrum(g, -w, kind, SpectrumPath::exact).diagonal();
                for (int i = 0; i < 3; ++i) {
                    CHECK(rel(a[i] / am[i], kms) < 1e-12);
                    CHECK(rel(e[i] / em[i], kms) < 1e-5);
                }
            }
        }
    }
}

TEST_CASE("tensor structure, positivity and monotonicity") {
    const double w = 30 * mhz;
    double previous_e = INFINITY;
    double previous_b = INFINITY;
    for (double z = 1e-7; z < 1e-3; z *= 2.0) {
        const auto g = at(z);
        for (auto kind : {FieldKind::electric, FieldKind::magnetic}) {
            const auto m = spectrum(g, w, kind, SpectrumPath::exact).components;
            CHECK(m(0, 0) == doctest::Approx(m(1, 1)).epsilon(1e-12));
            CHECK(m(0, 1) == 0.0);
            CHECK(m(0, 2) == 0.0);
            CHECK(m(1, 2) == 0.0);
            CHECK(m.isApprox(m.transpose()));
            CHECK((m.diagonal().array() > 0.0).all());
        }
        const double e = electric_spectrum_exact(g, w)(2, 2);
        const double b = magnetic_spectrum_exact(g, w)(0, 0);
        CHECK(e < previous_e);
        CHECK(b < previous_b);
        previous_e = e;
        previous_b = b;
    }
}

TEST_CASE("magnetic asymptotic spectrum: flatness and resistivity scaling") {
    const auto g = at(1e-6);
    double lo = INFINITY;
    double hi = 0.0;
    for (double f = 1e4; f <= 1e7 * 1.0001; f *= std::pow(10.0, 0.1)) {
        const double s = magnetic_spectrum_asymptotic(g, two_pi * f)(0, 0);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    CHECK(hi / lo <= 1.1);

    const auto g2 = at(1e-8, 2 * 1.7e-8);
    const auto g1 = at(1e-8, 1.7e-8);
    CHECK(magnetic_spectrum_asymptotic(g2, mhz)(2, 2) ==
          doctest::Approx(0.5 * magnetic_spectrum_asymptotic(g1, mhz)(2, 2)).epsilon(1e-6));
}

TEST_CASE("validity flag") {
    CHECK_FALSE(electric_spectrum_asymptotic(at(1e-6), mhz).outside_validity);
    CHECK(electric_spectrum_asymptotic(at(100.0), mhz).outside_validity);
    CHECK(magnetic_spectrum_asymptotic(at(100.0), mhz).outside_validity);
}

TEST_CASE("blackbody reference") {
    const auto env = make_environment(300.0);
    const double w = 1e3;
    CHECK(blackbody_spectrum(w, env) ==
          doctest::Approx(c::k_B * 300.0 * w * w / (3 * c::pi * c::epsilon_0 * std::pow(c::c, 3)))
              .epsilon(1e-8));
    CHECK(blackbody_spectrum(1e-3, env) < 1e-40);
    const double wt = two_pi * 5e12;
    CHECK(rel(blackbody_spectrum(wt, env) / blackbody_spectrum(-wt, env),
              std::exp(c::hbar * wt / (c::k_B * 300.0))) < 1e-12);
    CHECK(blackbody_magnetic_spectrum(mhz, env) ==
          doctest::Approx(blackbody_spectrum(mhz, env) / (c::c * c::c)).epsilon(1e-14));

    CHECK(electric_spectrum_asymptotic(at(1e-6), mhz)(2, 2) / blackbody_spectrum(mhz, env) > 1e3);
}

TEST_CASE("exact path with the free-space term approaches the blackbody level far away") {
    const double w = 100 * mhz;
    const double lambda = two_pi * c::c / w;
    ExactOptions opts;
    opts.include_free_space = true;
    const auto g = at(100 * lambda);
    const auto env = g.env;
    const auto e = electric_spectrum_exact(g, w, opts).diagonal();
    const auto b = magnetic_spectrum_exact(g, w, opts).diagonal();
    for (int i = 0; i < 3; ++i) {
        CHECK(rel(e[i], blackbody_spectrum(w, env)) < 0.02);
        CHECK(rel(b[i], blackbody_magnetic_spectrum(w, env)) < 0.02);
    }
}

TEST_CASE("johnson noise and effective resistance") {
    const auto env = make_environment(300.0);
    const double q = c::e;
    CHECK(johnson_noise_spectrum(q, 2e-6, 1.0, env) ==
          doctest::Approx(0.25 * johnson_noise_spectrum(q, 1e-6, 1.0, env)).epsilon(1e-14));
    CHECK(johnson_noise_spectrum(q, 1e-6, 0.0, env) == 0.0);
    CHECK(johnson_noise_spectrum(q, 1e-6, 1.0, env) ==
          doctest::Approx(q * q * c::k_B * 300.0 / 1e-12).epsilon(1e-14));
    CHECK_THROWS_AS(johnson_noise_spectrum(q, 0.0, 1.0, env), DomainError);
    CHECK_THROWS_AS(johnson_noise_spectrum(q, 1e-6, -1.0, env), DomainError);

    const auto cu = copper();
    CHECK(effective_resistance(cu, 4 * mhz) ==
          doctest::Approx(2 * effective_resistance(cu, mhz)).epsilon(1e-14));
    const auto cu4 = make_material("cu4", 4 * cu.rho);
    CHECK(effective_resistance(cu4, mhz) ==
          doctest::Approx(2 * effective_resistance(cu, mhz)).epsilon(1e-14));

    // Nyquist with R_eff reproduces the z/delta branch summed over the three components,
    // with the thermal factor in its high-temperature form
    const double z = 3e-4;
    const double delta = skin_depth(cu, mhz);
    const double branch = c::k_B * 300.0 * cu.rho / (4 * c::pi * z * z * z) * (z / delta);
    CHECK(rel(johnson_noise_spectrum(q, z, effective_resistance(cu, mhz), env) / (q * q),
              3.0 * branch) < 1e-12);
}

TEST_CASE("lateral correlation") {
    const double z = 1e-6;
    const double w = 30 * mhz;
    const auto g = at(z);
    SUBCASE("normalisation") {
        for (auto kind : {FieldKind::electric, FieldKind::magnetic}) {
            const auto c0 = lateral_correlation(g, w, kind, 0.0);
            CHECK((c0 - Eigen::Vector3d::Ones()).norm() <= 1e-9);
            const auto ca = lateral_correlation_asymptotic(g, kind, 0.0);
            CHECK((ca - Eigen::Vector3d::Ones()).norm() <= 1e-15);
        }
        CHECK_THROWS_AS(lateral_correlation(g, w, FieldKind::magnetic, -1.0), DomainError);
    }
    SUBCASE("exact follows the short-distance closed form") {
        const auto gn = at(1e-7);
        for (auto kind : {FieldKind::electric, FieldKind::magnetic}) {
            for (double s : {0.05e-7, 0.3e-7, 1e-7, 4e-7}) {
                const auto ce = lateral_correlation(gn, mhz, kind, s);
                const auto ca = lateral_correlation_asymptotic(gn, kind, s);
                CHECK((ce - ca).cwiseAbs().maxCoeff() < 0.03);
            }
        }
    }
    SUBCASE("half-width of order z and algebraic tail") {
        std::vector<double> s_values;
        for (double s = 0.05 * z; s <= 50 * z * 1.0001; s *= 1.1) s_values.push_back(s);
        const auto curve = lateral_correlation_curve(g, w, FieldKind::magnetic, s_values,
                                                     SpectrumPath::exact);
        double half = -1.0;
        for (std::size_t i = 0; i < s_values.size(); ++i) {
            CHECK(std::abs(curve.c_values[i][2]) <= 1.0 + 1e-9);
            if (half < 0.0 && curve.c_values[i][2] <= 0.5) half = s_values[i];
        }
        CHECK(half >= 0.3 * z);
        CHECK(half <= 5 * z);

        const auto c5 = lateral_correlation(g, w, FieldKind::magnetic, 5 * z)[2];
        const auto c50 = lateral_correlation(g, w, FieldKind::magnetic, 50 * z)[2];
        const double slope = log_slope(std::abs(c5), std::abs(c50), 5 * z, 50 * z);
        CHECK(slope < 0.0);
        CHECK(slope > -4.0);
    }
}

TEST_CASE("providers") {
    const auto g = at(1e-6);
    const auto env = g.env;
    const auto exact = exact_provider(g, FieldKind::electric)(mhz);
    CHECK(exact.components.isApprox(electric_spectrum_exact(g, mhz).components));
    const auto asym = asymptotic_provider(g, FieldKind::magnetic)(mhz);
    CHECK(asym.kind == FieldKind::magnetic);
    CHECK(asym.units() == magnetic_spectrum_asymptotic(g, mhz).units());
    const auto bb = blackbody_provider(env, FieldKind::magnetic)(mhz).components;
    CHECK(bb.isApprox(blackbody_magnetic_spectrum(mhz, env) * Eigen::Matrix3d::Identity()));
    const auto j = johnson_provider(1e-6, 1.0, env)(mhz).components;
    CHECK(j(1, 1) == doctest::Approx(c::k_B * 300.0 / 1e-12).epsilon(1e-14));
    CHECK_THROWS_AS(make_geometry(0.0, copper(), env), DomainError);
}
