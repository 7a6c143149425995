#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace spincount {

/// Regular (x, y) grid of a scalar, read from or written to delimited text:
///
///   # grid: nx ny x0 y0 dx dy
///   # units: <length unit> <value unit>
///   x,y,value
///   ...
///
/// Rows may come in any order; every node must appear exactly once. Values
/// are stored in SI. Lookups use bilinear interpolation and return 0 outside
/// the grid.
class FieldMap {
 public:
  FieldMap() = default;
  FieldMap(std::size_t nx, std::size_t ny, double x0, double y0, double dx, double dy);

  static FieldMap parse(std::string_view text);
  static FieldMap load(const std::string& path);

  /// `value_unit` is "T" for field maps and "Hz" for coupling maps; values are
  /// divided by `value_scale` before printing.
  void write(std::ostream& out, std::string_view value_unit = "T", double value_scale = 1.0,
             std::string_view length_unit = "nm") const;

  double value(double x, double y) const noexcept;
  double& at(std::size_t i, std::size_t j) { return values_[j * nx_ + i]; }
  double at(std::size_t i, std::size_t j) const { return values_[j * nx_ + i]; }
  double x(std::size_t i) const noexcept { return x0_ + dx_ * static_cast<double>(i); }
  double y(std::size_t j) const noexcept { return y0_ + dy_ * static_cast<double>(j); }

  std::size_t nx() const noexcept { return nx_; }
  std::size_t ny() const noexcept { return ny_; }
  double dx() const noexcept { return dx_; }
  double dy() const noexcept { return dy_; }

 private:
  std::size_t nx_ = 0;
  std::size_t ny_ = 0;
  double x0_ = 0.0;
  double y0_ = 0.0;
  double dx_ = 1.0;
  double dy_ = 1.0;
  std::vector<double> values_;
};

}  // namespace spincount
