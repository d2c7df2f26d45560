// output.hpp — tables and their CSV / JSON serialisation

#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace nearfield::cli {

using Cell = std::variant<double, std::string>;

struct Table {
    std::string name;  // file stem
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row);
};

/// Shortest round-trip-free fixed format: 12 significant digits, C locale.
std::string format_number(double value);

std::string to_csv(const Table& table);
nlohmann::ordered_json to_json(const Table& table);

/// Writes `text` to `path`, throwing std::runtime_error with the path on failure.
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace nearfield::cli
