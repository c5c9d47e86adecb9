#include "hnls/grid.hpp"

#include <cmath>
#include <string>

#include "hnls/error.hpp"

namespace hnls {

HalfLineGrid::HalfLineGrid(double length, int cells, double horizon, int steps)
    : length_(length), cells_(cells), horizon_(horizon), steps_(steps) {
  require(std::isfinite(length) && length > 0.0, ErrorCode::kInvalidInput, "grid length must be positive");
  require(std::isfinite(horizon) && horizon > 0.0, ErrorCode::kInvalidInput, "time horizon must be positive");
  require(cells >= 8, ErrorCode::kInvalidInput, "need at least 8 spatial cells, got " + std::to_string(cells));
  require(steps >= 2, ErrorCode::kInvalidInput, "need at least 2 time steps, got " + std::to_string(steps));
}

HalfLineGrid HalfLineGrid::refined(int factor) const {
  return HalfLineGrid(length_, cells_ * factor, horizon_, steps_ * factor);
}

GridFunction::GridFunction(const HalfLineGrid& grid) : grid_(grid), values_(grid.nodes()) {}

GridFunction::GridFunction(const HalfLineGrid& grid, std::vector<Complex> values)
    : grid_(grid), values_(std::move(values)) {
  require(static_cast<int>(values_.size()) == grid_.nodes(), ErrorCode::kInvalidInput,
          "grid function length " + std::to_string(values_.size()) + " does not match " +
              std::to_string(grid_.nodes()) + " nodes");
}

GridFunction::GridFunction(const HalfLineGrid& grid, const ProfileFn& profile)
    : grid_(grid), values_(grid.nodes()) {
  for (int j = 0; j < grid.nodes(); ++j) values_[j] = profile(grid.x(j));
}

void GridFunction::require_finite() const {
  for (const Complex& v : values_) {
    require(std::isfinite(v.real()) && std::isfinite(v.imag()), ErrorCode::kInvalidInput,
            "grid function contains non-finite samples");
  }
}

FieldHistory::FieldHistory(const HalfLineGrid& grid) : grid_(grid) {
  slices_.reserve(grid.steps() + 1);
}

void FieldHistory::push_back(std::span<const Complex> slice) {
  require(static_cast<int>(slice.size()) == grid_.nodes(), ErrorCode::kInvalidInput,
          "history slice has wrong length");
  require(levels() < grid_.steps() + 1, ErrorCode::kInvalidInput, "history already holds every time level");
  slices_.emplace_back(slice.begin(), slice.end());
}

GridFunction FieldHistory::at(int n) const {
  return GridFunction(grid_, std::vector<Complex>(slices_[n].begin(), slices_[n].end()));
}

FieldHistory FieldHistory::sample(const HalfLineGrid& grid, const FieldFn& field) {
  FieldHistory history(grid);
  std::vector<Complex> slice(grid.nodes());
  for (int n = 0; n <= grid.steps(); ++n) {
    const double t = grid.t(n);
    for (int j = 0; j < grid.nodes(); ++j) slice[j] = field(t, grid.x(j));
    history.push_back(slice);
  }
  return history;
}

}  // namespace hnls
