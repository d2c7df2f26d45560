// commands.cpp

#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "nearfield/constants.hpp"
#include "nearfield/errors.hpp"
#include "nearfield/halfspace.hpp"
#include "nearfield/materials.hpp"
#include "nearfield/parallel.hpp"
#include "nearfield/rates.hpp"
#include "nearfield/transport.hpp"

namespace nearfield::cli {

namespace c = nearfield::constants;
using json = nlohmann::ordered_json;

namespace {

constexpr double two_pi = 2.0 * c::pi;
constexpr double micron = 1e-6;

// ---- config helpers -------------------------------------------------------

GridSpec grid_or(std::optional<double> lo, std::optional<double> hi, std::optional<int> n,
                 GridSpec fallback) {
    if (lo) fallback.min = *lo;
    if (hi) fallback.max = *hi;
    if (n) fallback.points = *n;
    return fallback;
}

std::vector<double> z_grid(const RunConfig& cfg) {
    return grid_or(cfg.z_min, cfg.z_max, cfg.z_points, {0.1 * micron, 100 * micron, 60, true})
        .values();
}

Material material(const RunConfig& cfg) {
    if (!cfg.material_file.empty()) return MaterialTable::from_file(cfg.material_file).get(cfg.material);
    const std::filesystem::path shipped = std::filesystem::path(NEARFIELD_DATA_DIR) / "materials.txt";
    if (std::filesystem::exists(shipped)) return MaterialTable::from_file(shipped).get(cfg.material);
    return MaterialTable().get(cfg.material);
}

FieldKind field_kind(const std::string& name) {
    if (name == "electric") return FieldKind::electric;
    if (name == "magnetic") return FieldKind::magnetic;
    throw ConfigError("unknown field kind '" + name + "'");
}

std::vector<SpectrumPath> paths(const std::string& name) {
    if (name == "exact") return {SpectrumPath::exact};
    if (name == "asymptotic") return {SpectrumPath::asymptotic};
    if (name == "both") return {SpectrumPath::exact, SpectrumPath::asymptotic};
    throw ConfigError("unknown spectrum path '" + name + "'");
}

std::string with_path(const std::string& stem, SpectrumPath p) {
    return stem + "_" + std::string(to_string(p));
}

SpectrumProvider provider(const HalfSpaceGeometry& g, FieldKind kind, SpectrumPath p, double tol) {
    return p == SpectrumPath::exact ? exact_provider(g, kind, ExactOptions{tol, false})
                                    : asymptotic_provider(g, kind);
}

json base_metadata(const RunConfig& cfg, const Material& m) {
    json meta;
    meta["command"] = cfg.command;
    meta["material"] = {{"name", m.name}, {"rho_ohm_m", m.rho}};
    meta["temperature_K"] = cfg.temperature;
    return meta;
}

const std::vector<std::string> spectrum_columns{"z_m", "omega_rad_s", "Sxx", "Syy", "Szz",
                                                "units", "kind", "path"};
const std::vector<std::string> ion_columns{"z_m", "gamma_plus", "gamma_minus", "Gamma_0to1"};
const std::vector<std::string> spin_columns{"z_m", "larmor_rad_s", "Gamma_flip"};
const std::vector<std::string> coherence_columns{"t_s", "s_m", "re_gamma", "im_gamma", "stderr"};
const std::vector<std::string> moment_columns{"t_s", "dp2", "dr2", "stderr_dp2", "stderr_dr2"};

// ---- shared sweeps --------------------------------------------------------

struct IonRow {
    double z;
    RatePair rates;
};

std::vector<IonRow> ion_sweep(const RunConfig& cfg, const Material& m,
                              const std::vector<double>& zs,
                              const std::function<SpectrumProvider(const HalfSpaceGeometry&)>& make) {
    const auto env = make_environment(cfg.temperature);
    const double omega = two_pi * cfg.frequency.value_or(1e6);
    std::vector<IonRow> rows(zs.size());
    parallel_for(zs.size(), [&](std::size_t i) {
        const auto g = make_geometry(zs[i], m, env);
        const auto trap = make_ion_trap(cfg.ion_mass_amu * c::amu, cfg.charge_e * c::e, omega,
                                        Eigen::Vector3d::UnitZ(), g);
        rows[i] = {zs[i], heating_rates(trap, make(g))};
    });
    return rows;
}

Table ion_table(const std::string& name, const std::vector<IonRow>& rows) {
    Table t{name, ion_columns, {}};
    for (const auto& r : rows) {
        t.add_row({r.z, r.rates.gamma_plus, r.rates.gamma_minus, r.rates.ground_state_heating()});
    }
    return t;
}

Series ion_series(const std::string& label, const std::vector<IonRow>& rows, bool markers = false) {
    Series s{label, {}, {}, markers};
    for (const auto& r : rows) {
        s.x.push_back(r.z / micron);
        s.y.push_back(r.rates.ground_state_heating());
    }
    return s;
}

struct SpinRow {
    double z;
    double larmor;
    double rate;
};

std::vector<SpinRow> spin_sweep(const RunConfig& cfg, const Material& m,
                                const std::vector<double>& zs,
                                const std::function<SpectrumProvider(const HalfSpaceGeometry&)>& make) {
    const auto env = make_environment(cfg.temperature);
    const std::size_t nl = cfg.larmor_mhz.size();
    std::vector<SpinRow> rows(nl * zs.size());
    parallel_for(rows.size(), [&](std::size_t k) {
        const double larmor = two_pi * 1e6 * cfg.larmor_mhz[k / zs.size()];
        const double z = zs[k % zs.size()];
        const auto g = make_geometry(z, m, env);
        const auto spec = make_spin_trap(c::mu_B, larmor, g);
        rows[k] = {z, larmor, spin_flip_rate(spec, make(g))};
    });
    return rows;
}

Table spin_table(const std::string& name, const std::vector<SpinRow>& rows) {
    Table t{name, spin_columns, {}};
    for (const auto& r : rows) t.add_row({r.z, r.larmor, r.rate});
    return t;
}

std::vector<Series> spin_series(const std::string& label, const std::vector<SpinRow>& rows,
                                bool markers = false) {
    std::vector<Series> out;
    for (const auto& r : rows) {
        char name[64];
        std::snprintf(name, sizeof name, "%s %g MHz", label.c_str(), r.larmor / (two_pi * 1e6));
        if (out.empty() || out.back().label != name) out.push_back({name, {}, {}, markers});
        out.back().x.push_back(r.z / micron);
        out.back().y.push_back(r.rate);
    }
    return out;
}

struct SpectrumRow {
    double z;
    double omega;
    SpectrumTensor s;
};

std::vector<SpectrumRow> spectrum_sweep(const Material& m, double temperature,
                                        const std::vector<double>& zs,
                                        const std::vector<double>& omegas, FieldKind kind,
                                        SpectrumPath p, double tol) {
    const auto env = make_environment(temperature);
    std::vector<SpectrumRow> rows(zs.size() * omegas.size());
    parallel_for(rows.size(), [&](std::size_t k) {
        const double z = zs[k / omegas.size()];
        const double w = omegas[k % omegas.size()];
        rows[k] = {z, w, spectrum(make_geometry(z, m, env), w, kind, p, ExactOptions{tol, false})};
    });
    return rows;
}

Table spectrum_table(const std::string& name, const std::vector<SpectrumRow>& rows, SpectrumPath p) {
    Table t{name, spectrum_columns, {}};
    for (const auto& r : rows) {
        const auto d = r.s.diagonal();
        t.add_row({r.z, r.omega, d[0], d[1], d[2], std::string(r.s.units()),
                   std::string(to_string(r.s.kind)), std::string(to_string(p))});
    }
    return t;
}

// ---- transport helpers ----------------------------------------------------

CorrelationModel transport_model(const RunConfig& cfg) {
    return make_correlation_model(cfg.gamma, cfg.ell, parse_family(cfg.family), cfg.dim);
}

TransportParams transport_params(const RunConfig& cfg) {
    if (cfg.force.empty() || cfg.force.size() > 2) throw ConfigError("--force takes one or two components");
    const Vec f(cfg.force[0], cfg.force.size() > 1 ? cfg.force[1] : 0.0);
    if (cfg.dim == 1 && f.y() != 0.0) throw ConfigError("--force has a y component but --dim is 1");
    return make_transport_params(cfg.mass, f, cfg.dim);
}

json transport_metadata(const RunConfig& cfg) {
    json meta;
    meta["command"] = cfg.command;
    meta["dim"] = cfg.dim;
    meta["family"] = cfg.family;
    meta["gamma_per_s"] = cfg.gamma;
    meta["ell_m"] = cfg.ell;
    meta["mass_kg"] = cfg.mass;
    meta["force_N"] = cfg.force;
    meta["particles"] = cfg.particles;
    meta["seed"] = cfg.seed;
    return meta;
}

}  // namespace

// ---- grids ----------------------------------------------------------------

std::vector<double> GridSpec::values() const {
    if (points < 1) throw ConfigError("grid needs at least one point");
    if (!std::isfinite(min) || !std::isfinite(max)) throw ConfigError("grid bounds must be finite");
    if (log && !(min > 0.0)) throw ConfigError("log grid needs a positive lower bound");
    if (points == 1) return {min};
    if (!(max > min)) throw ConfigError("grid must be strictly increasing (min < max)");
    std::vector<double> out(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double f = static_cast<double>(i) / (points - 1);
        out[static_cast<std::size_t>(i)] =
            log ? std::exp(std::log(min) + f * (std::log(max) - std::log(min))) : min + f * (max - min);
    }
    out.front() = min;
    out.back() = max;
    return out;
}

// ---- figures --------------------------------------------------------------

CommandOutput cmd_fig2(const RunConfig& cfg) {
    const auto m = material(cfg);
    const auto zs = z_grid(cfg);
    const auto env = make_environment(cfg.temperature);
    const double tol = cfg.tol;

    CommandOutput out;
    Plot plot{"fig2", "Ion heating rate", "z (um)", "Gamma_0to1 (1/s)", true, true, {}};
    for (auto p : paths(cfg.path)) {
        const auto rows = ion_sweep(cfg, m, zs, [&](const HalfSpaceGeometry& g) {
            return provider(g, FieldKind::electric, p, tol);
        });
        out.tables.push_back(ion_table(with_path("fig2", p), rows));
        plot.series.push_back(ion_series(std::string(to_string(p)), rows, p == SpectrumPath::exact));
    }
    const auto johnson = ion_sweep(cfg, m, zs, [&](const HalfSpaceGeometry& g) {
        return johnson_provider(g.z, cfg.resistance, env);
    });
    out.tables.push_back(ion_table("fig2_johnson", johnson));
    plot.series.push_back(ion_series("Johnson", johnson));
    out.plots.push_back(std::move(plot));

    out.metadata = base_metadata(cfg, m);
    out.metadata["ion_mass_amu"] = cfg.ion_mass_amu;
    out.metadata["charge_e"] = cfg.charge_e;
    out.metadata["trap_frequency_Hz"] = cfg.frequency.value_or(1e6);
    out.metadata["johnson_resistance_ohm"] = cfg.resistance;
    return out;
}

CommandOutput cmd_fig4(const RunConfig& cfg) {
    const auto m = material(cfg);
    const auto zs = z_grid(cfg);
    const auto env = make_environment(cfg.temperature);
    if (cfg.larmor_mhz.empty()) throw ConfigError("--larmor-mhz needs at least one value");

    CommandOutput out;
    Plot plot{"fig4", "Spin flip rate", "z (um)", "Gamma_flip (1/s)", true, true, {}};
    for (auto p : paths(cfg.path)) {
        const auto rows = spin_sweep(cfg, m, zs, [&](const HalfSpaceGeometry& g) {
            return provider(g, FieldKind::magnetic, p, cfg.tol);
        });
        out.tables.push_back(spin_table(with_path("fig4", p), rows));
        for (auto& s : spin_series(std::string(to_string(p)), rows, p == SpectrumPath::exact)) {
            plot.series.push_back(std::move(s));
        }
    }
    const auto bb = spin_sweep(cfg, m, zs, [&](const HalfSpaceGeometry&) {
        return blackbody_provider(env, FieldKind::magnetic);
    });
    out.tables.push_back(spin_table("fig4_blackbody", bb));
    for (auto& s : spin_series("blackbody", bb)) plot.series.push_back(std::move(s));
    out.plots.push_back(std::move(plot));

    out.metadata = base_metadata(cfg, m);
    out.metadata["mu_J_per_T"] = c::mu_B;
    out.metadata["larmor_MHz"] = cfg.larmor_mhz;
    return out;
}

CommandOutput cmd_fig5(const RunConfig& cfg) {
    const auto m = material(cfg);
    const double z = cfg.z.value_or(micron);
    const auto fs = grid_or(cfg.f_min, cfg.f_max, cfg.f_points, {1e3, 1e9, 61, true}).values();
    std::vector<double> omegas;
    for (double f : fs) omegas.push_back(two_pi * f);

    CommandOutput out;
    Plot plot{"fig5", "Magnetic near-field spectrum", "frequency (Hz)", "S_B (T^2 s)", true, true, {}};
    for (auto p : paths(cfg.path)) {
        const auto rows = spectrum_sweep(m, cfg.temperature, {z}, omegas, FieldKind::magnetic, p, cfg.tol);
        out.tables.push_back(spectrum_table(with_path("fig5", p), rows, p));
        Series xx{std::string(to_string(p)) + " xx", {}, {}, p == SpectrumPath::exact};
        Series zz{std::string(to_string(p)) + " zz", {}, {}, p == SpectrumPath::exact};
        for (const auto& r : rows) {
            xx.x.push_back(r.omega / two_pi);
            xx.y.push_back(r.s(0, 0));
            zz.x.push_back(r.omega / two_pi);
            zz.y.push_back(r.s(2, 2));
        }
        plot.series.push_back(std::move(xx));
        plot.series.push_back(std::move(zz));
    }
    out.plots.push_back(std::move(plot));
    out.metadata = base_metadata(cfg, m);
    out.metadata["z_m"] = z;
    return out;
}

CommandOutput cmd_fig6(const RunConfig& cfg) {
    const auto m = material(cfg);
    const double z = cfg.z.value_or(micron);
    const double omega = two_pi * cfg.frequency.value_or(30e6);
    const auto kind = field_kind(cfg.kind.value_or("magnetic"));
    const auto s_over_z = GridSpec{0.0, cfg.s_max.value_or(10.0), cfg.s_points.value_or(101), false}.values();
    std::vector<double> ss;
    for (double x : s_over_z) ss.push_back(x * z);
    const auto g = make_geometry(z, m, make_environment(cfg.temperature));

    CommandOutput out;
    Table table{"fig6", {"s_m", "Cxx", "Cyy", "Czz", "path"}, {}};
    Plot plot{"fig6", "Lateral correlation of the near field", "s / z", "C(s)", false, false, {}};
    const char* names[] = {"xx", "yy", "zz"};
    for (auto p : paths(cfg.path)) {
        const auto curve = lateral_correlation_curve(g, omega, kind, ss, p, cfg.tol);
        std::vector<Series> series;
        for (const char* n : names) series.push_back({std::string(to_string(p)) + " " + n, {}, {}, p == SpectrumPath::exact});
        for (std::size_t i = 0; i < ss.size(); ++i) {
            const auto& cv = curve.c_values[i];
            table.add_row({ss[i], cv[0], cv[1], cv[2], std::string(to_string(p))});
            for (int k = 0; k < 3; ++k) {
                series[static_cast<std::size_t>(k)].x.push_back(s_over_z[i]);
                series[static_cast<std::size_t>(k)].y.push_back(cv[k]);
            }
        }
        for (auto& s : series) plot.series.push_back(std::move(s));
    }
    out.tables.push_back(std::move(table));
    out.plots.push_back(std::move(plot));
    out.metadata = base_metadata(cfg, m);
    out.metadata["z_m"] = z;
    out.metadata["omega_rad_s"] = omega;
    out.metadata["kind"] = std::string(to_string(kind));
    return out;
}

CommandOutput cmd_fig7(const RunConfig& cfg) {
    const auto model = transport_model(cfg);
    const auto params = transport_params(cfg);
    if (!(model.gamma > 0.0)) throw ConfigError("fig7 needs --gamma > 0");
    const auto s_over_ell = GridSpec{0.0, cfg.s_max.value_or(10.0), cfg.s_points.value_or(41), false}.values();
    const std::vector<double> gamma_t{0.0, 0.5, 1.0, 2.0, 5.0};
    std::vector<double> ts;
    for (double g : gamma_t) ts.push_back(g / model.gamma);

    // a momentum eigenstate has Gamma_0(s) = 1, so Gamma(s; t) is the decay factor itself
    const AnalyticState state{gaussian_initial_transform(0.0, 0.0), model, params};
    SimulationOptions opts;
    for (double x : s_over_ell) opts.s_values.push_back(Vec(x * model.ell, 0.0));
    const auto mc = simulate_ensemble(model, params, cfg.particles, cfg.seed, ts,
                                      gaussian_sampler(model.dim, 0.0, 0.0), opts);

    CommandOutput out;
    Table analytic{"fig7_analytic", coherence_columns, {}};
    Table sampled{"fig7_mc", coherence_columns, {}};
    Plot plot{"fig7", "Spatial decoherence in a waveguide", "s / ell", "|Gamma(s, t)|", false, false, {}};
    for (std::size_t k = 0; k < ts.size(); ++k) {
        char label[32];
        std::snprintf(label, sizeof label, "gamma t = %g", gamma_t[k]);
        Series line{label, {}, {}, false};
        Series dots{std::string(label) + " MC", {}, {}, true};
        for (std::size_t i = 0; i < s_over_ell.size(); ++i) {
            const Vec s(s_over_ell[i] * model.ell, 0.0);
            const auto g = coherence_function(state, s, ts[k]);
            analytic.add_row({ts[k], s.x(), g.real(), g.imag(), 0.0});
            const auto& est = mc.coherence[k * s_over_ell.size() + i];
            sampled.add_row({ts[k], s.x(), est.value.real(), est.value.imag(), est.stderr});
            line.x.push_back(s_over_ell[i]);
            line.y.push_back(std::abs(g));
            dots.x.push_back(s_over_ell[i]);
            dots.y.push_back(std::abs(est.value));
        }
        plot.series.push_back(std::move(line));
        plot.series.push_back(std::move(dots));
    }
    out.tables.push_back(std::move(analytic));
    out.tables.push_back(std::move(sampled));
    out.plots.push_back(std::move(plot));
    out.metadata = transport_metadata(cfg);
    return out;
}

// ---- generic sweeps -------------------------------------------------------

CommandOutput cmd_spectrum(const RunConfig& cfg) {
    const auto m = material(cfg);
    const auto kind = field_kind(cfg.kind.value_or("electric"));
    const auto zs = z_grid(cfg);
    std::vector<double> fs;
    if (cfg.frequency) {
        fs = {*cfg.frequency};
    } else {
        fs = grid_or(cfg.f_min, cfg.f_max, cfg.f_points, {1e6, 1e6, 1, true}).values();
    }
    std::vector<double> omegas;
    for (double f : fs) omegas.push_back(two_pi * f);

    CommandOutput out;
    Plot plot{"spectrum", "Near-field spectrum", "z (um)", "S_zz", true, true, {}};
    for (auto p : paths(cfg.path)) {
        const auto rows = spectrum_sweep(m, cfg.temperature, zs, omegas, kind, p, cfg.tol);
        out.tables.push_back(spectrum_table(with_path("spectrum", p), rows, p));
        for (std::size_t j = 0; j < omegas.size(); ++j) {
            char label[64];
            std::snprintf(label, sizeof label, "%s %g Hz", std::string(to_string(p)).c_str(), fs[j]);
            Series s{label, {}, {}, p == SpectrumPath::exact};
            for (std::size_t i = 0; i < zs.size(); ++i) {
                s.x.push_back(zs[i] / micron);
                s.y.push_back(rows[i * omegas.size() + j].s(2, 2));
            }
            plot.series.push_back(std::move(s));
        }
    }
    out.plots.push_back(std::move(plot));
    out.metadata = base_metadata(cfg, m);
    out.metadata["kind"] = std::string(to_string(kind));
    return out;
}

CommandOutput cmd_rates(const RunConfig& cfg) {
    const auto m = material(cfg);
    const auto zs = z_grid(cfg);
    CommandOutput out;
    out.metadata = base_metadata(cfg, m);
    out.metadata["species"] = cfg.species;
    if (cfg.species == "ion") {
        Plot plot{"rates_ion", "Ion heating rate", "z (um)", "Gamma_0to1 (1/s)", true, true, {}};
        for (auto p : paths(cfg.path)) {
            const auto rows = ion_sweep(cfg, m, zs, [&](const HalfSpaceGeometry& g) {
                return provider(g, FieldKind::electric, p, cfg.tol);
            });
            out.tables.push_back(ion_table(with_path("rates_ion", p), rows));
            plot.series.push_back(ion_series(std::string(to_string(p)), rows, p == SpectrumPath::exact));
        }
        out.plots.push_back(std::move(plot));
        out.metadata["ion_mass_amu"] = cfg.ion_mass_amu;
        out.metadata["trap_frequency_Hz"] = cfg.frequency.value_or(1e6);
    } else if (cfg.species == "spin") {
        if (cfg.larmor_mhz.empty()) throw ConfigError("--larmor-mhz needs at least one value");
        Plot plot{"rates_spin", "Spin flip rate", "z (um)", "Gamma_flip (1/s)", true, true, {}};
        for (auto p : paths(cfg.path)) {
            const auto rows = spin_sweep(cfg, m, zs, [&](const HalfSpaceGeometry& g) {
                return provider(g, FieldKind::magnetic, p, cfg.tol);
            });
            out.tables.push_back(spin_table(with_path("rates_spin", p), rows));
            for (auto& s : spin_series(std::string(to_string(p)), rows, p == SpectrumPath::exact)) {
                plot.series.push_back(std::move(s));
            }
        }
        out.plots.push_back(std::move(plot));
        out.metadata["larmor_MHz"] = cfg.larmor_mhz;
    } else {
        throw ConfigError("unknown species '" + cfg.species + "' (ion or spin)");
    }
    return out;
}

CommandOutput cmd_transport(const RunConfig& cfg) {
    const auto model = transport_model(cfg);
    const auto params = transport_params(cfg);
    if (cfg.t_points < 2) throw ConfigError("--t-points must be at least 2");
    if (!(cfg.gamma_t_max > 0.0)) throw ConfigError("--gamma-t-max must be positive");
    // time unit 1/gamma, or 1 s without scattering
    const double unit = model.gamma > 0.0 ? 1.0 / model.gamma : 1.0;
    const auto ts = GridSpec{0.0, cfg.gamma_t_max * unit, cfg.t_points, false}.values();

    SimulationOptions opts;
    for (double x : cfg.s_over_ell) opts.s_values.push_back(Vec(x * model.ell, 0.0));
    const auto mc = simulate_ensemble(model, params, cfg.particles, cfg.seed, ts,
                                      gaussian_sampler(model.dim, 0.0, 0.0), opts);
    const AnalyticState state{gaussian_initial_transform(0.0, 0.0), model, params};

    CommandOutput out;
    Table sampled{"transport_coherence", coherence_columns, {}};
    Table analytic{"transport_coherence_analytic", coherence_columns, {}};
    for (const auto& est : mc.coherence) {
        sampled.add_row({est.t, est.s.x(), est.value.real(), est.value.imag(), est.stderr});
        const auto g = coherence_function(state, est.s, est.t);
        analytic.add_row({est.t, est.s.x(), g.real(), g.imag(), 0.0});
    }
    Table moments{"transport_moments", moment_columns, {}};
    Plot plot{"transport", "Momentum spread", "t (s)", "dp^2 (kg^2 m^2 / s^2)", false, false, {}};
    Series measured{"Monte Carlo", {}, {}, true};
    Series predicted{"2 D_p t", {}, {}, false};
    for (const auto& me : mc.moments) {
        moments.add_row({me.t, me.dp2, me.dr2, me.stderr_dp2, me.stderr_dr2});
        measured.x.push_back(me.t);
        measured.y.push_back(me.dp2);
        predicted.x.push_back(me.t);
        predicted.y.push_back(momentum_variance(model, params, 0.0, me.t));
    }
    plot.series = {measured, predicted};
    out.tables = {std::move(sampled), std::move(analytic), std::move(moments)};
    out.plots.push_back(std::move(plot));
    out.metadata = transport_metadata(cfg);
    out.metadata["diffusion_coefficient"] = momentum_diffusion_coefficient(model);
    return out;
}

CommandOutput dispatch(const RunConfig& cfg) {
    if (cfg.command == "fig2") return cmd_fig2(cfg);
    if (cfg.command == "fig4") return cmd_fig4(cfg);
    if (cfg.command == "fig5") return cmd_fig5(cfg);
    if (cfg.command == "fig6") return cmd_fig6(cfg);
    if (cfg.command == "fig7") return cmd_fig7(cfg);
    if (cfg.command == "spectrum") return cmd_spectrum(cfg);
    if (cfg.command == "rates") return cmd_rates(cfg);
    if (cfg.command == "transport") return cmd_transport(cfg);
    throw ConfigError("unknown command '" + cfg.command + "'");
}

// ---- output ---------------------------------------------------------------

std::vector<std::filesystem::path> write_outputs(const RunConfig& cfg, const CommandOutput& output) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + cfg.out.string() + ": " + ec.message());

    std::vector<std::filesystem::path> written;
    if (cfg.format == Format::json) {
        json doc;
        doc["command"] = cfg.command;
        doc["metadata"] = output.metadata;
        doc["tables"] = json::array();
        for (const auto& t : output.tables) doc["tables"].push_back(to_json(t));
        const auto path = cfg.out / (cfg.command + ".json");
        write_file(path, doc.dump(2) + "\n");
        written.push_back(path);
        return written;
    }
    for (const auto& t : output.tables) {
        const auto path = cfg.out / (t.name + ".csv");
        write_file(path, to_csv(t));
        written.push_back(path);
    }
    if (cfg.format == Format::svg) {
        for (const auto& p : output.plots) {
            const auto path = cfg.out / (p.name + ".svg");
            write_file(path, render_svg(p));
            written.push_back(path);
        }
    }
    return written;
}

// ---- command line ---------------------------------------------------------

std::vector<std::string> config_file_arguments(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::vector<std::string> args;
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || key == "config") {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": invalid key '" + key + "'");
        }
        args.push_back("--" + key);
        args.push_back(value);
    }
    return args;
}

int exit_code(const std::exception& error) {
    if (dynamic_cast<const ConvergenceError*>(&error)) return 3;
    if (dynamic_cast<const ConfigError*>(&error) || dynamic_cast<const DomainError*>(&error) ||
        dynamic_cast<const std::invalid_argument*>(&error)) {
        return 2;
    }
    return 1;
}

namespace {

std::vector<double> parse_list(const std::string& text, const char* flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError(std::string(flag) + ": cannot parse '" + item + "' as a number");
        }
    }
    return out;
}

std::string join(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += format_number(values[i]);
    }
    return out;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    std::string format = "csv";
    std::string config_path;
    std::string larmor = join(cfg.larmor_mhz);
    std::string force = join(cfg.force);
    std::string s_over_ell = join(cfg.s_over_ell);

    CLI::App app{"Thermal near-field noise above metal surfaces: spectra, trap heating and "
                 "spin-flip rates, matter-wave decoherence"};
    app.name("nearfield-noise");
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.fallthrough();

    app.add_option("--out", cfg.out, "Output directory");
    app.add_option("--format", format, "csv, json or svg (CSV plus SVG plots)")
        ->check(CLI::IsMember({"csv", "json", "svg"}));
    app.add_option("--material", cfg.material, "Material name from the table");
    app.add_option("--material-file", cfg.material_file, "Material table (name.rho = value lines)");
    app.add_option("--temperature", cfg.temperature, "Temperature in K");
    app.add_option("--tol", cfg.tol, "Relative tolerance of the exact quadrature");
    app.add_option("--config", config_path, "key = value file; its entries override flags");

    struct Entry {
        const char* name;
        const char* help;
    };
    const Entry commands[] = {
        {"fig2", "Ion heating rate vs height: exact, asymptotic and Johnson reference"},
        {"fig4", "Spin-flip rate vs height for several Larmor frequencies, with blackbody reference"},
        {"fig5", "Magnetic spectrum vs frequency at fixed height"},
        {"fig6", "Lateral correlation of the near field vs separation"},
        {"fig7", "Decay of the spatial coherence function, analytic and Monte Carlo"},
        {"spectrum", "Spectrum tensor sweep over heights and frequencies"},
        {"rates", "Heating (ion) or spin-flip (spin) rate sweep"},
        {"transport", "Monte Carlo transport with coherence and moment estimators"},
    };
    for (const auto& entry : commands) {
        CLI::App* sub = app.add_subcommand(entry.name, entry.help);
        sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        sub->fallthrough();
        sub->add_option("--z-min", cfg.z_min, "Lowest height, m");
        sub->add_option("--z-max", cfg.z_max, "Highest height, m");
        sub->add_option("--z-points", cfg.z_points, "Number of heights (log spaced)");
        sub->add_option("--f-min", cfg.f_min, "Lowest frequency, Hz");
        sub->add_option("--f-max", cfg.f_max, "Highest frequency, Hz");
        sub->add_option("--f-points", cfg.f_points, "Number of frequencies (log spaced)");
        sub->add_option("--z", cfg.z, "Height, m (fig5, fig6)");
        sub->add_option("--frequency", cfg.frequency, "Frequency, Hz (trap, spectrum or correlation)");
        sub->add_option("--s-max", cfg.s_max, "Largest separation in units of z (fig6) or ell (fig7)");
        sub->add_option("--s-points", cfg.s_points, "Number of separations");
        sub->add_option("--kind", cfg.kind, "electric or magnetic")
            ->check(CLI::IsMember({"electric", "magnetic"}));
        sub->add_option("--path", cfg.path, "exact, asymptotic or both")
            ->check(CLI::IsMember({"exact", "asymptotic", "both"}));
        sub->add_option("--species", cfg.species, "ion or spin (rates)")
            ->check(CLI::IsMember({"ion", "spin"}));
        sub->add_option("--ion-mass-amu", cfg.ion_mass_amu, "Ion mass in amu");
        sub->add_option("--charge-e", cfg.charge_e, "Ion charge in units of e");
        sub->add_option("--resistance", cfg.resistance, "Johnson reference resistance, Ohm");
        sub->add_option("--larmor-mhz", larmor, "Comma-separated Larmor frequencies, MHz");
        sub->add_option("--dim", cfg.dim, "Waveguide dimension")->check(CLI::IsMember({1, 2}));
        sub->add_option("--family", cfg.family, "lorentzian or gaussian")
            ->check(CLI::IsMember({"lorentzian", "gaussian"}));
        sub->add_option("--gamma", cfg.gamma, "Forward-scattering rate, 1/s");
        sub->add_option("--ell", cfg.ell, "Correlation length, m");
        sub->add_option("--mass", cfg.mass, "Atom mass, kg");
        sub->add_option("--force", force, "External force, N (Fx or Fx,Fy)");
        sub->add_option("--particles", cfg.particles, "Monte Carlo ensemble size");
        sub->add_option("--seed", cfg.seed, "Random seed");
        sub->add_option("--gamma-t-max", cfg.gamma_t_max, "Final time in units of 1/gamma");
        sub->add_option("--t-points", cfg.t_points, "Number of output times");
        sub->add_option("--s-over-ell", s_over_ell, "Comma-separated separations in units of ell");
    }

    std::vector<std::string> args = raw_args;
    try {
        // the config file is appended after the flags so that its entries win
        for (std::size_t i = 0; i < raw_args.size(); ++i) {
            std::string path;
            if (raw_args[i] == "--config" && i + 1 < raw_args.size()) {
                path = raw_args[i + 1];
            } else if (raw_args[i].rfind("--config=", 0) == 0) {
                path = raw_args[i].substr(9);
            }
            if (!path.empty()) {
                const auto extra = config_file_arguments(path);
                args.insert(args.end(), extra.begin(), extra.end());
            }
        }
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        err << "nearfield-noise: " << e.what() << "\n";
        return exit_code(e);
    }

    try {
        cfg.command = app.get_subcommands().front()->get_name();
        cfg.format = format == "json" ? Format::json : format == "svg" ? Format::svg : Format::csv;
        cfg.larmor_mhz = parse_list(larmor, "--larmor-mhz");
        cfg.force = parse_list(force, "--force");
        cfg.s_over_ell = parse_list(s_over_ell, "--s-over-ell");
        const auto output = dispatch(cfg);
        for (const auto& path : write_outputs(cfg, output)) out << path.string() << "\n";
        return 0;
    } catch (const std::exception& e) {
        err << "nearfield-noise " << cfg.command << ": " << e.what() << "\n";
        return exit_code(e);
    }
}

}  // namespace nearfield::cli
