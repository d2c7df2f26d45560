// transport.hpp — decoherence and momentum diffusion of guided matter waves
//
// Atoms move freely in D = 1 or 2 dimensions under a constant external force and
// scatter off a broadband fluctuating potential with correlation gamma C(s).
//
// Conventions. Vectors are Eigen::Vector2d; for D = 1 only the x component is used
// and the y component is ignored. The double Fourier transform of the Wigner function is
//     W~(k, s) = int d^D r d^D p exp(i k.r - i p.s / hbar) W(r, p),
// so that Gamma(s) = W~(0, s) = int d^D r rho(r; s) and W~(0, 0) = 1 is the norm.
// With this convention the exact solution of the transport equation reads
//     W~(k, s; t) = W~0(k, s - hbar k t / m) exp(-i F.s t / hbar + i F.k t^2 / (2 m))
//                   exp(-gamma int_0^t (1 - C(s - hbar k t' / m)) dt').

#pragma once

#include <Eigen/Core>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

namespace nearfield {

using Vec = Eigen::Vector2d;

enum class CorrelationFamily { lorentzian, gaussian };

std::string_view to_string(CorrelationFamily family);
/// Throws ConfigError for unknown names.
CorrelationFamily parse_family(std::string_view name);

struct CorrelationModel {
    double gamma{};  // forward-scattering rate, s^-1
    double ell{};    // correlation length, m
    CorrelationFamily family{CorrelationFamily::lorentzian};
    int dim{1};

    /// C(s): 1 / (1 + s^2 / l^2) or exp(-s^2 / l^2)
    double correlation(const Vec& s) const;
};

/// Throws DomainError unless gamma >= 0, ell > 0 and dim is 1 or 2.
CorrelationModel make_correlation_model(double gamma, double ell, CorrelationFamily family,
                                        int dim);

struct TransportParams {
    double mass{};  // kg
    Vec force{Vec::Zero()};
    int dim{1};
};

TransportParams make_transport_params(double mass, Vec force, int dim);

// ---- Wigner function ------------------------------------------------------

/// rho(r; s) in one dimension. Hermitian means rho(r; -s) = conj(rho(r; s)).
using DensityMatrix1D = std::function<std::complex<double>(double r, double s)>;

struct WignerGridSpec {
    std::vector<double> r;
    std::vector<double> p;
    double s_max{};     // separations sampled on [-s_max, s_max]
    int s_points{513};  // odd, so that s = 0 is on the grid
};

struct WignerGrid {
    std::vector<double> r;
    std::vector<double> p;
    Eigen::MatrixXd values;  // values(i, j) = W(r_i, p_j)
    double max_imaginary{};  // largest |Im W| dropped from the discrete transform
};

/// W(r, p) = (2 pi hbar)^-1 int ds exp(i p s / hbar) rho(r; s), evaluated as a
/// discrete sum on the s grid. Throws DomainError if rho is not Hermitian.
WignerGrid wigner_transform(const DensityMatrix1D& rho, const WignerGridSpec& grid);

// ---- scattering kernel ----------------------------------------------------

/// Momentum-kick distribution S_V(q), normalised to total weight gamma.
class KickKernel {
public:
    explicit KickKernel(CorrelationModel model) : model_(model) {}

    const CorrelationModel& model() const { return model_; }
    double total_rate() const { return model_.gamma; }
    /// S_V(q) in (kg m/s)^-D s^-1
    double density(const Vec& q) const;
    /// One kick drawn from S_V / gamma.
    Vec sample(std::mt19937_64& rng) const;

private:
    CorrelationModel model_;
};

KickKernel kick_kernel(const CorrelationModel& model);

// ---- analytic propagator --------------------------------------------------

using InitialTransform = std::function<std::complex<double>(const Vec& k, const Vec& s)>;

struct AnalyticState {
    InitialTransform initial;
    CorrelationModel model;
    TransportParams params;
};

/// Gaussian cloud centred at the origin with per-component position and momentum
/// standard deviations dx0, dp0 and mean momentum p0.
InitialTransform gaussian_initial_transform(double dx0, double dp0, Vec p0 = Vec::Zero());

std::complex<double> propagate_analytic(const AnalyticState& state, const Vec& k, const Vec& s,
                                        double t);

/// Gamma(s; t) = W~(k = 0, s; t)
std::complex<double> coherence_function(const AnalyticState& state, const Vec& s, double t);

/// gamma (1 - C(s))
double decoherence_rate(const CorrelationModel& model, const Vec& s);

// ---- moments --------------------------------------------------------------

/// D_p = hbar^2 gamma / l^2. The per-component momentum variance grows as 2 D_p t.
double momentum_diffusion_coefficient(const CorrelationModel& model);

/// Variance of one Cartesian momentum component.
double momentum_variance(const CorrelationModel& model, const TransportParams& params,
                         double dp0_sq, double t);
/// Sum over the D components.
double momentum_variance_trace(const CorrelationModel& model, const TransportParams& params,
                               double dp0_sq, double t);

/// Variance of one Cartesian position component for an initially uncorrelated cloud:
/// dx0^2 + dp0^2 t^2 / m^2 + (2/3) D_p t^3 / m^2.
double position_variance(const CorrelationModel& model, const TransportParams& params,
                         double dx0_sq, double dp0_sq, double t);

/// l / sqrt(gamma t) for gamma t >= 1. Returns nullopt when the coherence never drops
/// to 1/e: gamma = 0, or gamma t < 1 where exp(-gamma t (1 - C)) > 1/e for all s.
std::optional<double> coherence_length(const CorrelationModel& model, double t);

/// Separation along x where |Gamma(s; t) / Gamma(s; 0)| first falls to 1/e, by
/// bisection on the analytic solution. nullopt if there is no such point.
std::optional<double> measured_coherence_length(const AnalyticState& state, double t);

// ---- Monte Carlo ----------------------------------------------------------

struct Particle {
    Vec r{Vec::Zero()};
    Vec p{Vec::Zero()};
};

struct Ensemble {
    std::vector<Particle> particles;
    std::uint64_t rng_seed{};
    double time{};
};

using InitialSampler = std::function<Particle(std::mt19937_64& rng)>;

InitialSampler gaussian_sampler(int dim, double dx0, double dp0, Vec p0 = Vec::Zero());

struct CoherenceEstimate {
    double t{};
    Vec s{Vec::Zero()};
    std::complex<double> value;  // estimate of Gamma(s; t) / Gamma(s; 0)
    double stderr{};
};

struct MomentEstimate {
    double t{};
    double dp2{};  // per-component variances, averaged over the D components
    double dr2{};
    double stderr_dp2{};
    double stderr_dr2{};
    Vec mean_p{Vec::Zero()};
    Vec stderr_mean_p{Vec::Zero()};
};

struct SimulationOptions {
    int batches{20};
    std::vector<Vec> s_values;  // separations for the coherence estimator
    bool keep_snapshots{false};
};

struct SimulationResult {
    std::vector<Ensemble> snapshots;  // one per t_grid entry when keep_snapshots is set
    std::vector<CoherenceEstimate> coherence;  // t-major, then s
    std::vector<MomentEstimate> moments;
};

/// Poisson scattering at rate gamma with kicks from kick_kernel, exact flight under
/// the external force between events. Particle i draws from its own generator seeded
/// by (seed, i), so results do not depend on the thread count.
SimulationResult simulate_ensemble(const CorrelationModel& model, const TransportParams& params,
                                   int n_particles, std::uint64_t seed,
                                   const std::vector<double>& t_grid,
                                   const InitialSampler& sampler,
                                   const SimulationOptions& options = {});

}  // namespace nearfield
