#include "tensorlight/io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <unistd.h>

#include "tensorlight/error.hpp"

namespace tl {

namespace {

struct UnitEntry {
  Dimension dimension;
  double factor;
};

const std::map<std::string, UnitEntry, std::less<>>& unit_table() {
  static const std::map<std::string, UnitEntry, std::less<>> table{
      {"m", {Dimension::length, 1.0}},
      {"mm", {Dimension::length, 1e-3}},
      {"um", {Dimension::length, 1e-6}},
      {"\xC2\xB5m", {Dimension::length, 1e-6}},
      {"nm", {Dimension::length, 1e-9}},
      {"rad", {Dimension::angle, 1.0}},
      {"deg", {Dimension::angle, kPi / 180.0}},
      {"Hz", {Dimension::frequency, 2.0 * kPi}},
      {"kHz", {Dimension::frequency, 2.0 * kPi * 1e3}},
      {"MHz", {Dimension::frequency, 2.0 * kPi * 1e6}},
      {"GHz", {Dimension::frequency, 2.0 * kPi * 1e9}},
      {"kg", {Dimension::mass, 1.0}},
      {"u", {Dimension::mass, kAtomicMassUnit}},
  };
  return table;
}

const char* dimension_name(Dimension d) {
  switch (d) {
  case Dimension::length: return "length (m, mm, um, nm)";
  case Dimension::angle: return "angle (rad, deg)";
  case Dimension::frequency: return "frequency (Hz, kHz, MHz, GHz)";
  case Dimension::mass: return "mass (kg, u)";
  }
  return "quantity";
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  return out;
}

double parse_cell(const std::string& cell, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(where + ": '" + cell + "' is not a number");
  }
}

// Recovers [min, max] from cell-centre nodes; exact for uniform grids up to
// rounding of the printed coordinates.
std::pair<double, double> extent_from_nodes(const std::vector<double>& nodes) {
  const double step = (nodes.back() - nodes.front()) / static_cast<double>(nodes.size() - 1);
  return {nodes.front() - 0.5 * step, nodes.back() + 0.5 * step};
}

} // namespace

double parse_quantity(std::string_view text, Dimension dimension, const std::string& path) {
  const std::string s(text);
  std::size_t used = 0;
  double number = 0.0;
  try {
    number = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError(path + ": expected a " + dimension_name(dimension) + " such as \"1 um\", got \"" + s + "\"");
  }
  std::string unit = s.substr(used);
  unit.erase(0, unit.find_first_not_of(' '));
  unit.erase(unit.find_last_not_of(' ') + 1);
  const auto it = unit_table().find(unit);
  if (unit.empty() || it == unit_table().end() || it->second.dimension != dimension)
    throw ConfigError(path + ": expected a " + dimension_name(dimension) + " with explicit unit, got \"" + s + "\"");
  if (!std::isfinite(number)) throw ConfigError(path + ": value must be finite");
  return number * it->second.factor;
}

void write_atomically(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw ConfigError("cannot write " + tmp.string());
    os << content;
    os.flush();
    if (!os) throw ConfigError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw ConfigError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

std::string map_csv(const MapDataset& map, const std::vector<double>& values) {
  const GridSpec& g = map.grid;
  std::string out;
  out.reserve(g.size() * 24 + 256);
  out += "# " + map.label + "; rows y (um), columns x (um), z = " + format_g17(g.z * 1e6) +
         " um; scale_factor = " + format_g17(map.scale_factor) + "\n";
  out += "y\\x";
  for (int i = 0; i < g.nx; ++i) out += "," + format_g17(g.x(i) * 1e6);
  out += "\n";
  for (int j = 0; j < g.ny; ++j) {
    out += format_g17(g.y(j) * 1e6);
    for (int i = 0; i < g.nx; ++i) {
      out += ',';
      out += format_g17(values[g.index(i, j)]);
    }
    out += '\n';
  }
  return out;
}

MapDataset read_map_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open " + path.string());
  MapDataset map;
  std::string line;
  std::vector<double> xs, ys;
  std::vector<std::vector<double>> rows;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (line[0] == '#') {
      if (line_no == 1) {
        const auto semi = line.find(';');
        map.label = line.substr(2, semi == std::string::npos ? std::string::npos : semi - 2);
        const auto sf = line.find("scale_factor = ");
        if (sf != std::string::npos) map.scale_factor = parse_cell(line.substr(sf + 15), where);
      }
      continue;
    }
    const auto cells = split_csv_line(line);
    if (!header_seen) {
      if (cells.empty() || cells[0] != "y\\x") throw ConfigError(where + ": expected axis header starting with y\\x");
      for (std::size_t c = 1; c < cells.size(); ++c) xs.push_back(parse_cell(cells[c], where));
      header_seen = true;
      continue;
    }
    if (cells.size() != xs.size() + 1)
      throw ConfigError(where + ": expected " + std::to_string(xs.size() + 1) + " columns");
    ys.push_back(parse_cell(cells[0], where));
    std::vector<double> row;
    for (std::size_t c = 1; c < cells.size(); ++c) row.push_back(parse_cell(cells[c], where));
    rows.push_back(std::move(row));
  }
  if (xs.size() < 2 || ys.size() < 2) throw ConfigError(path.string() + ": map needs at least 2 x 2 nodes");
  const auto [x0, x1] = extent_from_nodes(xs);
  const auto [y0, y1] = extent_from_nodes(ys);
  map.grid.x_min = x0 * 1e-6;
  map.grid.x_max = x1 * 1e-6;
  map.grid.y_min = y0 * 1e-6;
  map.grid.y_max = y1 * 1e-6;
  map.grid.nx = static_cast<int>(xs.size());
  map.grid.ny = static_cast<int>(ys.size());
  map.values.reserve(map.grid.size());
  for (const auto& row : rows) map.values.insert(map.values.end(), row.begin(), row.end());
  return map;
}

nlohmann::json grid_json(const GridSpec& g) {
  return {{"unit", "um"},   {"x_min", g.x_min * 1e6}, {"x_max", g.x_max * 1e6}, {"y_min", g.y_min * 1e6},
          {"y_max", g.y_max * 1e6}, {"nx", g.nx},       {"ny", g.ny},            {"z", g.z * 1e6},
          {"nodes", "cell centres"}, {"layout", "row-major, rows along y"}};
}

std::string gnuplot_matrix(const MapDataset& map) {
  const GridSpec& g = map.grid;
  std::string out = std::to_string(g.nx);
  for (int i = 0; i < g.nx; ++i) out += " " + format_g17(g.x(i) * 1e6);
  out += "\n";
  for (int j = 0; j < g.ny; ++j) {
    out += format_g17(g.y(j) * 1e6);
    for (int i = 0; i < g.nx; ++i) out += " " + format_g17(map.values[g.index(i, j)]);
    out += "\n";
  }
  return out;
}

} // namespace tl
