#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "tensorlight/scan.hpp"

namespace tl {

enum class Dimension { length, angle, frequency, mass };

/// Parses "<number> <unit>" into SI: lengths (m, mm, um, nm) in metres,
/// angles (rad, deg) in radians, frequencies (Hz, kHz, MHz, GHz, read as
/// omega / 2 pi) as angular frequencies in rad/s, masses (kg, u) in kg.
/// Throws ConfigError naming `path`.
double parse_quantity(std::string_view text, Dimension dimension, const std::string& path);

/// Writes `content` to a sibling temporary file and renames it over `path`.
void write_atomically(const std::filesystem::path& path, const std::string& content);

/// Row-major CSV: a comment line, an axis header "y\x" followed by the x
/// node coordinates in micrometres, then one row per y node starting with
/// its coordinate. Values use 17 significant digits.
std::string map_csv(const MapDataset& map, const std::vector<double>& values);

/// Loads a map written by map_csv. Throws ConfigError on malformed input.
MapDataset read_map_csv(const std::filesystem::path& path);

/// Grid description (micrometres) for sidecars.
nlohmann::json grid_json(const GridSpec& grid);

/// gnuplot "nonuniform matrix" text: first row holds nx and the x nodes,
/// every following row a y node and its values.
std::string gnuplot_matrix(const MapDataset& map);

} // namespace tl
