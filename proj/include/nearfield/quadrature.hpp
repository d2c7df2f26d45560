// quadrature.hpp — adaptive integration on finite and semi-infinite ranges
//
// The half-space spectra reduce to one-dimensional integrals over the lateral
// wavenumber whose integrands decay like exp(-2 u z). All routines here use a
// globally adaptive 7/15-point Gauss-Kronrod rule. Semi-infinite ranges are
// split at u = K * decay_scale; the tail is mapped onto (0, 1] via
// u = K * decay_scale / t. Bessel-weighted integrals are partitioned at the
// asymptotic zeros of J_n(u s) and the partial sums are accelerated with the
// Wynn epsilon algorithm.

#pragma once

#include <complex>
#include <functional>
#include <type_traits>
#include <utility>
#include <vector>

namespace nearfield::quadrature {

template <class T>
struct QuadratureResult {
    T value{};
    double error_estimate{};
    int evaluations{};
};

using RealIntegrand = std::function<double(double)>;
using ComplexIntegrand = std::function<std::complex<double>(double)>;

inline constexpr double default_tolerance = 1e-8;
inline constexpr double default_cutoff_factor = 20.0;

struct Options {
    double rel_tol{default_tolerance};
    double abs_tol{0.0};
    int max_evaluations{2'000'000};
    double cutoff_factor{default_cutoff_factor};  // K in u = K * decay_scale
    std::vector<double> breakpoints{};            // extra panel boundaries inside the head range
};

namespace detail {

QuadratureResult<double> finite(const RealIntegrand& f, double a, double b, const Options& opts);
QuadratureResult<std::complex<double>> finite(const ComplexIntegrand& f, double a, double b,
                                              const Options& opts);
QuadratureResult<double> semi_infinite(const RealIntegrand& f, double decay_scale,
                                       const Options& opts);
QuadratureResult<std::complex<double>> semi_infinite(const ComplexIntegrand& f,
                                                     double decay_scale, const Options& opts);
QuadratureResult<double> bessel(const RealIntegrand& envelope, int order, double s,
                                double decay_scale, double tol, double lower);
QuadratureResult<std::complex<double>> bessel(const ComplexIntegrand& envelope, int order,
                                              double s, double decay_scale, double tol,
                                              double lower);

template <class F>
auto wrap(F&& f) {
    using R = std::invoke_result_t<F&, double>;
    if constexpr (std::is_convertible_v<R, double> && !std::is_same_v<R, std::complex<double>>) {
        return RealIntegrand(std::forward<F>(f));
    } else {
        return ComplexIntegrand(std::forward<F>(f));
    }
}

}  // namespace detail

/// Integral over [a, b]. Throws ConvergenceError when the budget is exhausted.
/// Real integrands give QuadratureResult<double>, complex ones the complex variant.
template <class F>
auto integrate_finite(F&& f, double a, double b, const Options& opts = {}) {
    return detail::finite(detail::wrap(std::forward<F>(f)), a, b, opts);
}

/// Integral over (0, inf). `decay_scale` is the u-scale over which the
/// integrand decays (1 / (2 z) for exp(-2 u z)).
template <class F>
auto integrate_semi_infinite(F&& f, double decay_scale, double tol = default_tolerance) {
    Options opts;
    opts.rel_tol = tol;
    return detail::semi_infinite(detail::wrap(std::forward<F>(f)), decay_scale, opts);
}

template <class F>
auto integrate_semi_infinite(F&& f, double decay_scale, const Options& opts) {
    return detail::semi_infinite(detail::wrap(std::forward<F>(f)), decay_scale, opts);
}

/// Integral of envelope(u) * J_order(u s) over (lower, inf), order in {0, 1, 2}.
template <class F>
auto integrate_bessel_weighted(F&& envelope, int order, double s, double decay_scale,
                               double tol = default_tolerance, double lower = 0.0) {
    return detail::bessel(detail::wrap(std::forward<F>(envelope)), order, s, decay_scale, tol,
                          lower);
}

}  // namespace nearfield::quadrature
