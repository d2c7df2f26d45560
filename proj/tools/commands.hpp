// commands.hpp — nearfield-noise subcommands
//
// Every command turns a RunConfig into tables (CSV is the canonical output) and
// optional plots. Unset grid fields fall back to per-command defaults that match
// the figure being reproduced.

#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "output.hpp"
#include "svg.hpp"

namespace nearfield::cli {

enum class Format { csv, json, svg };

struct GridSpec {
    double min{};
    double max{};
    int points{};
    bool log{true};

    /// Throws ConfigError unless points >= 1, min <= max (min < max for points > 1)
    /// and, for log grids, min > 0.
    std::vector<double> values() const;
};

struct RunConfig {
    std::string command;
    std::string material{"copper"};
    std::string material_file;
    double temperature{300.0};
    std::filesystem::path out{"."};
    Format format{Format::csv};
    double tol{1e-6};

    // grids; unset fields take the command defaults
    std::optional<double> z_min, z_max;
    std::optional<int> z_points;
    std::optional<double> f_min, f_max;  // Hz
    std::optional<int> f_points;
    std::optional<double> z;          // single height, m
    std::optional<double> frequency;  // single frequency, Hz
    std::optional<double> s_max;      // in units of z (fig6) or ell (fig7, transport)
    std::optional<int> s_points;

    // fields and rates
    std::optional<std::string> kind;  // spectrum: electric, fig6: magnetic
    std::string path{"both"};
    std::string species{"ion"};
    double ion_mass_amu{40.0};
    double charge_e{1.0};
    double resistance{1.0};  // Ohm, Johnson reference
    std::vector<double> larmor_mhz{1.0, 100.0};

    // transport
    int dim{1};
    std::string family{"lorentzian"};
    double gamma{1.0};
    double ell{1e-6};
    double mass{87.0 * 1.66053906660e-27};  // kg, rubidium-87
    std::vector<double> force{0.0, 0.0};
    int particles{10000};
    std::uint64_t seed{1};
    double gamma_t_max{5.0};
    int t_points{11};
    std::vector<double> s_over_ell{0.5, 1.0, 5.0};
};

struct CommandOutput {
    std::vector<Table> tables;
    std::vector<Plot> plots;
    nlohmann::ordered_json metadata;
};

CommandOutput cmd_fig2(const RunConfig& config);
CommandOutput cmd_fig4(const RunConfig& config);
CommandOutput cmd_fig5(const RunConfig& config);
CommandOutput cmd_fig6(const RunConfig& config);
CommandOutput cmd_fig7(const RunConfig& config);
CommandOutput cmd_spectrum(const RunConfig& config);
CommandOutput cmd_rates(const RunConfig& config);
CommandOutput cmd_transport(const RunConfig& config);

CommandOutput dispatch(const RunConfig& config);

/// Writes CSV (csv, svg) or one JSON document (json), plus SVG plots (svg).
/// Returns the written paths in order.
std::vector<std::filesystem::path> write_outputs(const RunConfig& config,
                                                 const CommandOutput& output);

/// Parses `key = value` lines; keys are the long flag names without dashes.
std::vector<std::string> config_file_arguments(const std::filesystem::path& path);

/// 0 success, 1 I/O, 2 configuration, 3 numerical non-convergence.
int exit_code(const std::exception& error);

/// Full command-line entry point. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nearfield::cli
