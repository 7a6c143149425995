#include "spincount/field_map.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "spincount/units.hpp"

namespace spincount {

namespace {

double unit_scale(const std::string& unit, Quantity q) { return parse_quantity("1 " + unit, q); }

double value_unit_scale(const std::string& unit) {
  try {
    return unit_scale(unit, Quantity::kMagneticField);
  } catch (const ConfigError&) {
    return unit_scale(unit, Quantity::kFrequency);
  }
}

}  // namespace

FieldMap::FieldMap(std::size_t nx, std::size_t ny, double x0, double y0, double dx, double dy)
    : nx_(nx), ny_(ny), x0_(x0), y0_(y0), dx_(dx), dy_(dy), values_(nx * ny, 0.0) {
  if (nx < 2 || ny < 2 || !(dx > 0.0) || !(dy > 0.0)) {
    throw ConfigError("field map needs at least 2x2 nodes and positive spacing");
  }
}

FieldMap FieldMap::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  bool have_grid = false;
  std::size_t nx = 0, ny = 0;
  double g[4] = {0, 0, 0, 0};
  double length_scale = 1.0;
  double value_scale = 1.0;
  FieldMap map;
  std::vector<char> filled;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line[0] == '#') {
      std::istringstream h(line.substr(1));
      std::string tag;
      h >> tag;
      if (tag == "grid:") {
        if (!(h >> nx >> ny >> g[0] >> g[1] >> g[2] >> g[3])) {
          throw ConfigError(fmt::format("field map line {}: malformed grid header", line_no));
        }
        have_grid = true;
      } else if (tag == "units:") {
        std::string lu, vu;
        if (!(h >> lu >> vu)) throw ConfigError(fmt::format("field map line {}: malformed units", line_no));
        length_scale = unit_scale(lu, Quantity::kLength);
        value_scale = value_unit_scale(vu);
      }
      continue;
    }
    if (!have_grid) throw ConfigError("field map: data before '# grid:' header");
    if (map.values_.empty()) {
      map = FieldMap(nx, ny, g[0] * length_scale, g[1] * length_scale, g[2] * length_scale,
                     g[3] * length_scale);
      filled.assign(nx * ny, 0);
    }
    for (char& c : line) {
      if (c == ',' || c == ';' || c == '\t') c = ' ';
    }
    std::istringstream row(line);
    double x = 0, y = 0, v = 0;
    if (!(row >> x >> y >> v)) {
      // Skip a single column-title row.
      if (line_no > 0 && line.find_first_of("0123456789") == std::string::npos) continue;
      throw ConfigError(fmt::format("field map line {}: expected x y value", line_no));
    }
    x *= length_scale;
    y *= length_scale;
    const double fi = (x - map.x0_) / map.dx_;
    const double fj = (y - map.y0_) / map.dy_;
    const long i = std::lround(fi);
    const long j = std::lround(fj);
    if (i < 0 || j < 0 || i >= static_cast<long>(nx) || j >= static_cast<long>(ny) ||
        std::abs(fi - static_cast<double>(i)) > 1e-6 || std::abs(fj - static_cast<double>(j)) > 1e-6) {
      throw ConfigError(fmt::format("field map line {}: point off the declared grid", line_no));
    }
    const std::size_t idx = static_cast<std::size_t>(j) * nx + static_cast<std::size_t>(i);
    if (filled[idx]) throw ConfigError(fmt::format("field map line {}: duplicate node", line_no));
    filled[idx] = 1;
    map.values_[idx] = v * value_scale;
  }
  if (!have_grid) throw ConfigError("field map: missing '# grid:' header");
  for (char f : filled) {
    if (!f) throw ConfigError("field map: grid is incomplete");
  }
  if (filled.empty()) throw ConfigError("field map: no data rows");
  return map;
}

FieldMap FieldMap::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open field map '{}'", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void FieldMap::write(std::ostream& out, std::string_view value_unit, double value_scale,
                     std::string_view length_unit) const {
  const double ls = unit_scale(std::string(length_unit), Quantity::kLength);
  fmt::print(out, "# grid: {} {} {:.17g} {:.17g} {:.17g} {:.17g}\n", nx_, ny_, x0_ / ls, y0_ / ls,
             dx_ / ls, dy_ / ls);
  fmt::print(out, "# units: {} {}\n", length_unit, value_unit);
  fmt::print(out, "x,y,value\n");
  for (std::size_t j = 0; j < ny_; ++j) {
    for (std::size_t i = 0; i < nx_; ++i) {
      fmt::print(out, "{:.17g},{:.17g},{:.17g}\n", x(i) / ls, y(j) / ls, at(i, j) / value_scale);
    }
  }
}

double FieldMap::value(double x, double y) const noexcept {
  if (values_.empty()) return 0.0;
  const double fx = (x - x0_) / dx_;
  const double fy = (y - y0_) / dy_;
  const double max_x = static_cast<double>(nx_ - 1);
  const double max_y = static_cast<double>(ny_ - 1);
  if (fx < 0.0 || fy < 0.0 || fx > max_x || fy > max_y) return 0.0;
  const std::size_t i = std::min(static_cast<std::size_t>(fx), nx_ - 2);
  const std::size_t j = std::min(static_cast<std::size_t>(fy), ny_ - 2);
  const double tx = fx - static_cast<double>(i);
  const double ty = fy - static_cast<double>(j);
  return (1 - tx) * (1 - ty) * at(i, j) + tx * (1 - ty) * at(i + 1, j) +
         (1 - tx) * ty * at(i, j + 1) + tx * ty * at(i + 1, j + 1);
}

}  // namespace spincount
