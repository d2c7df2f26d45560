// materials.cpp

#include "nearfield/materials.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "nearfield/constants.hpp"
#include "nearfield/errors.hpp"

namespace nearfield {

namespace c = constants;

Material make_material(std::string name, double rho) {
    if (!(rho > 0.0) || !std::isfinite(rho)) {
        throw DomainError("material '" + name + "': specific resistance must be positive");
    }
    return Material{std::move(name), rho, PermittivityModel::ohmic};
}

ThermalEnvironment make_environment(double temperature) {
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
        throw DomainError("temperature must be positive");
    }
    return ThermalEnvironment{temperature};
}

Material copper() { return make_material("copper", 1.7e-8); }

std::complex<double> dielectric_function(const Material& material, double omega) {
    if (omega == 0.0) {
        throw DomainError("dielectric_function: omega = 0 (static conductivity diverges)");
    }
    const double im = 1.0 / (c::epsilon_0 * material.rho * std::abs(omega));
    return {1.0, omega > 0.0 ? im : -im};
}

double skin_depth(const Material& material, double omega) {
    if (omega == 0.0) {
        throw DomainError("skin_depth: omega = 0");
    }
    return c::c * std::sqrt(c::epsilon_0 * material.rho / std::abs(omega));
}

double planck_factor(double omega, const ThermalEnvironment& env) {
    const double kT = c::k_B * env.temperature;
    const double x = c::hbar * omega / kT;
    if (x == 0.0) {
        return kT;
    }
    // x / (1 - e^{-x}) = -x / expm1(-x), accurate for small |x|
    return kT * (-x / std::expm1(-x));
}

MaterialTable::MaterialTable() {
    insert(copper());
    insert(make_material("gold", 2.2e-8));
    insert(make_material("aluminium", 2.65e-8));
}

MaterialTable MaterialTable::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open material table '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse(buf.str());
    } catch (const ConfigError& err) {
        throw ConfigError(path.string() + ": " + err.what());
    }
}

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

MaterialTable MaterialTable::parse(const std::string& text) {
    MaterialTable table;
    std::istringstream lines(text);
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto dot = key.rfind('.');
        if (dot == std::string::npos || dot == 0 || key.substr(dot + 1) != "rho") {
            throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
        double rho = 0.0;
        try {
            std::size_t used = 0;
            rho = std::stod(value, &used);
            if (used != value.size()) {
                throw std::invalid_argument(value);
            }
        } catch (const std::exception&) {
            throw ConfigError("line " + std::to_string(lineno) + ": bad number '" + value + "'");
        }
        try {
            table.insert(make_material(key.substr(0, dot), rho));
        } catch (const DomainError& err) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + err.what());
        }
    }
    return table;
}

void MaterialTable::insert(Material material) {
    auto name = material.name;
    entries_.insert_or_assign(std::move(name), std::move(material));
}

const Material& MaterialTable::get(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) {
        throw ConfigError("unknown material '" + name + "'");
    }
    return it->second;
}

bool MaterialTable::contains(const std::string& name) const { return entries_.count(name) > 0; }

}  // namespace nearfield
