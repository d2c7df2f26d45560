// transport.cpp

#include "nearfield/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nearfield/constants.hpp"
#include "nearfield/errors.hpp"
#include "nearfield/parallel.hpp"
#include "nearfield/quadrature.hpp"

namespace nearfield {

namespace c = constants;
using cplx = std::complex<double>;

namespace {

Vec project(const Vec& v, int dim) { return dim == 1 ? Vec(v.x(), 0.0) : v; }

void check_time(double t, const char* what) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw DomainError(std::string(what) + ": t must be finite and non-negative");
    }
}

}  // namespace

std::string_view to_string(CorrelationFamily family) {
    return family == CorrelationFamily::lorentzian ? "lorentzian" : "gaussian";
}

CorrelationFamily parse_family(std::string_view name) {
    if (name == "lorentzian") return CorrelationFamily::lorentzian;
    if (name == "gaussian") return CorrelationFamily::gaussian;
    throw ConfigError("unknown correlation family '" + std::string(name) + "'");
}

double CorrelationModel::correlation(const Vec& s) const {
    const double x2 = project(s, dim).squaredNorm() / (ell * ell);
    return family == CorrelationFamily::lorentzian ? 1.0 / (1.0 + x2) : std::exp(-x2);
}

CorrelationModel make_correlation_model(double gamma, double ell, CorrelationFamily family,
                                        int dim) {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw DomainError("correlation model: gamma must be >= 0");
    if (!(ell > 0.0) || !std::isfinite(ell)) throw DomainError("correlation model: ell must be > 0");
    if (dim != 1 && dim != 2) throw DomainError("correlation model: dim must be 1 or 2");
    return {gamma, ell, family, dim};
}

TransportParams make_transport_params(double mass, Vec force, int dim) {
    if (!(mass > 0.0)) throw DomainError("transport: mass must be positive");
    if (dim != 1 && dim != 2) throw DomainError("transport: dim must be 1 or 2");
    if (!force.allFinite()) throw DomainError("transport: force must be finite");
    return {mass, project(force, dim), dim};
}

// ---- Wigner function ------------------------------------------------------

WignerGrid wigner_transform(const DensityMatrix1D& rho, const WignerGridSpec& grid) {
    if (!(grid.s_max > 0.0) || grid.s_points < 3 || grid.s_points % 2 == 0) {
        throw DomainError("wigner_transform: need s_max > 0 and an odd s_points >= 3");
    }
    const int half = grid.s_points / 2;
    const double ds = grid.s_max / half;

    WignerGrid out;
    out.r = grid.r;
    out.p = grid.p;
    out.values.resize(static_cast<Eigen::Index>(grid.r.size()),
                      static_cast<Eigen::Index>(grid.p.size()));

    std::vector<cplx> samples(static_cast<std::size_t>(grid.s_points));
    for (std::size_t i = 0; i < grid.r.size(); ++i) {
        const double r = grid.r[i];
        double scale = 0.0;
        for (int j = -half; j <= half; ++j) {
            samples[static_cast<std::size_t>(j + half)] = rho(r, j * ds);
            scale = std::max(scale, std::abs(samples[static_cast<std::size_t>(j + half)]));
        }
        for (int j = 1; j <= half; ++j) {
            const cplx plus = samples[static_cast<std::size_t>(half + j)];
            const cplx minus = samples[static_cast<std::size_t>(half - j)];
            if (std::abs(plus - std::conj(minus)) > 1e-10 * scale + 1e-300) {
                throw DomainError("wigner_transform: density matrix is not Hermitian");
            }
        }
        for (std::size_t k = 0; k < grid.p.size(); ++k) {
            cplx sum = 0.0;
            for (int j = -half; j <= half; ++j) {
                sum += std::polar(1.0, grid.p[k] * j * ds / c::hbar) *
                       samples[static_cast<std::size_t>(j + half)];
            }
            sum *= ds / (2.0 * c::pi * c::hbar);
            out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = sum.real();
            out.max_imaginary = std::max(out.max_imaginary, std::abs(sum.imag()));
        }
    }
    return out;
}

// ---- scattering kernel ----------------------------------------------------

double KickKernel::density(const Vec& q) const {
    const auto& m = model_;
    if (m.gamma == 0.0) return 0.0;
    const double x = project(q, m.dim).norm() * m.ell / c::hbar;
    const double unit = m.ell / c::hbar;  // inverse momentum scale
    if (m.family == CorrelationFamily::lorentzian) {
        if (m.dim == 1) return 0.5 * m.gamma * unit * std::exp(-x);
        if (x == 0.0) return std::numeric_limits<double>::infinity();
        return m.gamma * unit * unit * std::cyl_bessel_k(0.0, x) / (2.0 * c::pi);
    }
    const double per_dim = unit / (2.0 * std::sqrt(c::pi));
    return m.gamma * std::pow(per_dim, m.dim) * std::exp(-0.25 * x * x);
}

Vec KickKernel::sample(std::mt19937_64& rng) const {
    std::normal_distribution<double> normal;
    const double scale = c::hbar / model_.ell;
    double radial = std::sqrt(2.0);
    if (model_.family == CorrelationFamily::lorentzian) {
        // a Gaussian with an exponentially distributed variance has characteristic
        // function 1 / (1 + s^2 / l^2)
        std::exponential_distribution<double> exponential(1.0);
        radial = std::sqrt(2.0 * exponential(rng));
    }
    const double qx = normal(rng);
    const double qy = model_.dim == 2 ? normal(rng) : 0.0;
    return scale * radial * Vec(qx, qy);
}

KickKernel kick_kernel(const CorrelationModel& model) {
    return KickKernel(make_correlation_model(model.gamma, model.ell, model.family, model.dim));
}

// ---- analytic propagator --------------------------------------------------

InitialTransform gaussian_initial_transform(double dx0, double dp0, Vec p0) {
    if (!(dx0 >= 0.0) || !(dp0 >= 0.0)) throw DomainError("gaussian_initial_transform: widths must be >= 0");
    return [dx0, dp0, p0](const Vec& k, const Vec& s) {
        const double re = -0.5 * dx0 * dx0 * k.squaredNorm() -
                          0.5 * dp0 * dp0 * s.squaredNorm() / (c::hbar * c::hbar);
        return std::polar(std::exp(re), -p0.dot(s) / c::hbar);
    };
}

std::complex<double> propagate_analytic(const AnalyticState& state, const Vec& k_in,
                                        const Vec& s_in, double t) {
    check_time(t, "propagate_analytic");
    const auto& model = state.model;
    const auto& params = state.params;
    const int dim = model.dim;
    const Vec k = project(k_in, dim);
    const Vec s = project(s_in, dim);
    const Vec f = project(params.force, dim);
    const Vec drift = c::hbar * k / params.mass;  // ds/dt' of the argument of C

    const double phase = -f.dot(s) * t / c::hbar + f.dot(k) * t * t / (2.0 * params.mass);

    double exponent = 0.0;
    if (model.gamma > 0.0 && t > 0.0) {
        if (k.isZero()) {
            exponent = t * (1.0 - model.correlation(s));
        } else {
            quadrature::Options opts;
            opts.rel_tol = 1e-9;
            opts.abs_tol = 1e-15 * t;
            exponent = quadrature::integrate_finite(
                           [&](double tp) { return 1.0 - model.correlation(s - drift * tp); },
                           0.0, t, opts)
                           .value;
        }
    }
    return state.initial(k, s - drift * t) * std::polar(std::exp(-model.gamma * exponent), phase);
}

std::complex<double> coherence_function(const AnalyticState& state, const Vec& s, double t) {
    return propagate_analytic(state, Vec::Zero(), s, t);
}

double decoherence_rate(const CorrelationModel& model, const Vec& s) {
    return model.gamma * (1.0 - model.correlation(s));
}

// ---- moments --------------------------------------------------------------

double momentum_diffusion_coefficient(const CorrelationModel& model) {
    return c::hbar * c::hbar * model.gamma / (model.ell * model.ell);
}

double momentum_variance(const CorrelationModel& model, const TransportParams& params,
                         double dp0_sq, double t) {
    (void)params;
    check_time(t, "momentum_variance");
    return dp0_sq + 2.0 * momentum_diffusion_coefficient(model) * t;
}

double momentum_variance_trace(const CorrelationModel& model, const TransportParams& params,
                               double dp0_sq, double t) {
    return model.dim * momentum_variance(model, params, dp0_sq, t);
}

double position_variance(const CorrelationModel& model, const TransportParams& params,
                         double dx0_sq, double dp0_sq, double t) {
    check_time(t, "position_variance");
    const double m2 = params.mass * params.mass;
    return dx0_sq + dp0_sq * t * t / m2 +
           2.0 / 3.0 * momentum_diffusion_coefficient(model) * t * t * t / m2;
}

std::optional<double> coherence_length(const CorrelationModel& model, double t) {
    if (!(t > 0.0)) throw DomainError("coherence_length: t must be positive");
    const double gt = model.gamma * t;
    if (gt < 1.0) return std::nullopt;
    return model.ell / std::sqrt(gt);
}

std::optional<double> measured_coherence_length(const AnalyticState& state, double t) {
    if (!(t > 0.0)) throw DomainError("measured_coherence_length: t must be positive");
    const double target = std::exp(-1.0);
    auto ratio = [&](double s) {
        const Vec sv(s, 0.0);
        return std::abs(coherence_function(state, sv, t)) / std::abs(state.initial(Vec::Zero(), sv));
    };
    const double ell = state.model.ell;
    double lo = 0.0;
    double hi = 1e-4 * ell;
    for (double value = ratio(hi); !(value <= target); value = ratio(hi)) {
        // Gamma_0 underflowed before the coherence fell to 1/e
        if (!std::isfinite(value)) return std::nullopt;
        lo = hi;
        hi *= 1.25;
        if (hi > 1e4 * ell) return std::nullopt;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (ratio(mid) > target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// ---- Monte Carlo ----------------------------------------------------------

InitialSampler gaussian_sampler(int dim, double dx0, double dp0, Vec p0) {
    if (dim != 1 && dim != 2) throw DomainError("gaussian_sampler: dim must be 1 or 2");
    if (!(dx0 >= 0.0) || !(dp0 >= 0.0)) throw DomainError("gaussian_sampler: widths must be >= 0");
    return [dim, dx0, dp0, p0 = project(p0, dim)](std::mt19937_64& rng) {
        std::normal_distribution<double> normal;
        Particle out;
        out.r.x() = dx0 * normal(rng);
        out.p.x() = p0.x() + dp0 * normal(rng);
        if (dim == 2) {
            out.r.y() = dx0 * normal(rng);
            out.p.y() = p0.y() + dp0 * normal(rng);
        }
        return out;
    };
}

namespace {

std::mt19937_64 particle_engine(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

struct Record {
    Vec r;
    Vec p;
    Vec dp;  // accumulated kicks plus F t
};

// mean and standard error over batches of a per-batch statistic
template <class T>
std::pair<T, double> batch_error(const std::vector<T>& batch_values, T full) {
    const auto n = static_cast<double>(batch_values.size());
    if (batch_values.size() < 2) return {full, 0.0};
    T mean{};
    for (const auto& v : batch_values) mean += v;
    mean /= n;
    double ss = 0.0;
    for (const auto& v : batch_values) ss += std::norm(v - mean);
    return {full, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace

SimulationResult simulate_ensemble(const CorrelationModel& model_in, const TransportParams& params,
                                   int n_particles, std::uint64_t seed,
                                   const std::vector<double>& t_grid,
                                   const InitialSampler& sampler,
                                   const SimulationOptions& options) {
    if (n_particles < 1) throw DomainError("simulate_ensemble: need at least one particle");
    if (!sampler) throw DomainError("simulate_ensemble: invalid initial sampler");
    if (options.batches < 1 || options.batches > n_particles) {
        throw DomainError("simulate_ensemble: batches must be in [1, n_particles]");
    }
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        check_time(t_grid[i], "simulate_ensemble");
        if (i > 0 && !(t_grid[i] > t_grid[i - 1])) {
            throw DomainError("simulate_ensemble: t_grid must be strictly increasing");
        }
    }
    const CorrelationModel model =
        make_correlation_model(model_in.gamma, model_in.ell, model_in.family, model_in.dim);
    if (params.dim != model.dim) throw DomainError("simulate_ensemble: model and params disagree on dim");
    const int dim = model.dim;
    const KickKernel kernel(model);
    const Vec force = project(params.force, dim);
    const double mass = params.mass;

    const std::size_t n = static_cast<std::size_t>(n_particles);
    const std::size_t nt = t_grid.size();
    std::vector<Record> records(n * nt);

    parallel_for(n, [&](std::size_t i) {
        auto rng = particle_engine(seed, i);
        Particle state = sampler(rng);
        state.r = project(state.r, dim);
        state.p = project(state.p, dim);
        if (!state.r.allFinite() || !state.p.allFinite()) {
            throw DomainError("simulate_ensemble: initial sampler returned a non-finite particle");
        }
        Vec kicks = Vec::Zero();
        double now = 0.0;
        std::exponential_distribution<double> wait(model.gamma > 0.0 ? model.gamma : 1.0);
        double next = model.gamma > 0.0 ? wait(rng) : std::numeric_limits<double>::infinity();

        auto fly = [&](double until) {
            const double dt = until - now;
            state.r += state.p * (dt / mass) + force * (0.5 * dt * dt / mass);
            state.p += force * dt;
            now = until;
        };
        for (std::size_t k = 0; k < nt; ++k) {
            while (next <= t_grid[k]) {
                fly(next);
                const Vec q = kernel.sample(rng);
                state.p += q;
                kicks += q;
                next += wait(rng);
            }
            fly(t_grid[k]);
            records[i * nt + k] = {state.r, state.p, kicks + force * t_grid[k]};
        }
    });

    SimulationResult out;
    const int nb = options.batches;
    auto batch_begin = [&](int b) { return n * static_cast<std::size_t>(b) / static_cast<std::size_t>(nb); };

    for (std::size_t k = 0; k < nt; ++k) {
        const double t = t_grid[k];
        auto rec = [&](std::size_t i) -> const Record& { return records[i * nt + k]; };

        // per-component variance averaged over components, over particles [a, b)
        auto variance = [&](std::size_t a, std::size_t b, auto member) {
            const double m = static_cast<double>(b - a);
            Vec mean = Vec::Zero();
            for (std::size_t i = a; i < b; ++i) mean += rec(i).*member;
            mean /= m;
            double ss = 0.0;
            for (std::size_t i = a; i < b; ++i) {
                ss += (project(rec(i).*member - mean, dim)).squaredNorm();
            }
            return m > 1.0 ? ss / ((m - 1.0) * dim) : 0.0;
        };
        auto mean_p = [&](std::size_t a, std::size_t b) {
            Vec mean = Vec::Zero();
            for (std::size_t i = a; i < b; ++i) mean += rec(i).p;
            return Vec(mean / static_cast<double>(b - a));
        };

        MomentEstimate me;
        me.t = t;
        std::vector<double> bp, br, bx, by;
        for (int b = 0; b < nb; ++b) {
            bp.push_back(variance(batch_begin(b), batch_begin(b + 1), &Record::p));
            br.push_back(variance(batch_begin(b), batch_begin(b + 1), &Record::r));
            const Vec mp = mean_p(batch_begin(b), batch_begin(b + 1));
            bx.push_back(mp.x());
            by.push_back(mp.y());
        }
        std::tie(me.dp2, me.stderr_dp2) = batch_error(bp, variance(0, n, &Record::p));
        std::tie(me.dr2, me.stderr_dr2) = batch_error(br, variance(0, n, &Record::r));
        me.mean_p = mean_p(0, n);
        me.stderr_mean_p = Vec(batch_error(bx, me.mean_p.x()).second,
                               batch_error(by, me.mean_p.y()).second);
        out.moments.push_back(me);

        for (const Vec& s_in : options.s_values) {
            const Vec s = project(s_in, dim);
            auto phase_mean = [&](std::size_t a, std::size_t b) {
                cplx sum = 0.0;
                for (std::size_t i = a; i < b; ++i) sum += std::polar(1.0, -rec(i).dp.dot(s) / c::hbar);
                return sum / static_cast<double>(b - a);
            };
            std::vector<cplx> batches;
            for (int b = 0; b < nb; ++b) batches.push_back(phase_mean(batch_begin(b), batch_begin(b + 1)));
            const auto [value, err] = batch_error(batches, phase_mean(0, n));
            out.coherence.push_back({t, s, value, err});
        }

        if (options.keep_snapshots) {
            Ensemble e;
            e.rng_seed = seed;
            e.time = t;
            e.particles.reserve(n);
            for (std::size_t i = 0; i < n; ++i) e.particles.push_back({rec(i).r, rec(i).p});
            out.snapshots.push_back(std::move(e));
        }
    }
    return out;
}

}  // namespace nearfield
