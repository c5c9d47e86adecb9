#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace hnls {

using Complex = std::complex<double>;
using ProfileFn = std::function<Complex(double x)>;
using FieldFn = std::function<Complex(double t, double x)>;

/// Uniform space-time grid on [0, L] x [0, T]. Nodes x_j = j dx (j = 0..N),
/// levels t_n = n dt (n = 0..M).
class HalfLineGrid {
 public:
  HalfLineGrid(double length, int cells, double horizon, int steps);

  double length() const { return length_; }
  int cells() const { return cells_; }
  int nodes() const { return cells_ + 1; }
  double dx() const { return length_ / cells_; }
  double horizon() const { return horizon_; }
  int steps() const { return steps_; }
  double dt() const { return horizon_ / steps_; }
  double x(int j) const { return j * dx(); }
  double t(int n) const { return n * dt(); }

  /// Same spatial/temporal extent with both resolutions multiplied by `factor`.
  HalfLineGrid refined(int factor) const;

  bool operator==(const HalfLineGrid&) const = default;

 private:
  double length_;
  int cells_;
  double horizon_;
  int steps_;
};

/// One time slice u(t, .) sampled on the grid nodes.
class GridFunction {
 public:
  explicit GridFunction(const HalfLineGrid& grid);
  GridFunction(const HalfLineGrid& grid, std::vector<Complex> values);
  GridFunction(const HalfLineGrid& grid, const ProfileFn& profile);

  const HalfLineGrid& grid() const { return grid_; }
  std::span<const Complex> values() const { return values_; }
  std::span<Complex> values() { return values_; }
  Complex operator[](int j) const { return values_[j]; }
  Complex& operator[](int j) { return values_[j]; }
  int size() const { return static_cast<int>(values_.size()); }

  /// Throws invalid-input if any sample is NaN or infinite.
  void require_finite() const;

 private:
  HalfLineGrid grid_;
  std::vector<Complex> values_;
};

/// Solution (or source) samples at every time level t_0..t_M.
class FieldHistory {
 public:
  explicit FieldHistory(const HalfLineGrid& grid);

  const HalfLineGrid& grid() const { return grid_; }
  int levels() const { return static_cast<int>(slices_.size()); }
  bool complete() const { return levels() == grid_.steps() + 1; }

  void push_back(std::span<const Complex> slice);
  std::span<const Complex> slice(int n) const { return slices_[n]; }
  std::span<Complex> slice(int n) { return slices_[n]; }
  GridFunction at(int n) const;

  static FieldHistory sample(const HalfLineGrid& grid, const FieldFn& field);

 private:
  HalfLineGrid grid_;
  std::vector<std::vector<Complex>> slices_;
};

}  // namespace hnls
