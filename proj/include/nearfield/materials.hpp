// materials.hpp — ohmic conductor response and thermal occupation factors

#pragma once

#include <complex>
#include <filesystem>
#include <map>
#include <string>

namespace nearfield {

enum class PermittivityModel { ohmic };

struct Material {
    std::string name;
    double rho{};  // specific resistance, Ohm m
    PermittivityModel model{PermittivityModel::ohmic};
};

struct ThermalEnvironment {
    double temperature{};  // K
};

/// Validating constructors; throw DomainError on rho <= 0 or T <= 0.
Material make_material(std::string name, double rho);
ThermalEnvironment make_environment(double temperature);

/// Copper at room temperature, rho = 1.7e-8 Ohm m.
Material copper();

/// Relative permittivity of an ohmic conductor, eps = 1 + i / (eps0 rho omega).
/// Negative frequencies follow the reality condition eps(-w) = conj(eps(w)).
std::complex<double> dielectric_function(const Material& material, double omega);

/// Skin depth delta = c sqrt(eps0 rho / |omega|).
///
/// Note the convention: there is no factor sqrt(2) compared to the textbook
/// sqrt(2 rho / (mu0 omega)). The near-field interpolation formulas in
/// halfspace.hpp are written in terms of this delta.
double skin_depth(const Material& material, double omega);

/// Theta(omega, T) = hbar omega / (1 - exp(-hbar omega / kT)); equals kT at omega = 0.
double planck_factor(double omega, const ThermalEnvironment& env);

/// Named material table. The file format is flat `key = value` lines with keys
/// of the form `<name>.rho`; `#` starts a comment.
class MaterialTable {
public:
    /// Table with the built-in defaults (copper, gold, aluminium).
    MaterialTable();

    static MaterialTable from_file(const std::filesystem::path& path);
    static MaterialTable parse(const std::string& text);

    void insert(Material material);
    const Material& get(const std::string& name) const;
    bool contains(const std::string& name) const;

private:
    std::map<std::string, Material> entries_;
};

}  // namespace nearfield
