#pragma once

#include <span>
#include <vector>

#include "hnls/grid.hpp"

namespace hnls {

/// Square complex band matrix with LU factorization (partial pivoting).
class BandedLu {
 public:
  BandedLu(int n, int lower, int upper);

  int size() const { return n_; }
  /// Entry (i, j); |i - j| must lie inside the band. Only valid before factor().
  void set(int i, int j, Complex value);
  void add(int i, int j, Complex value);
  /// Throws singular-operator when a zero pivot is met.
  void factor();
  bool factored() const { return factored_; }
  /// Overwrites `rhs` with the solution.
  void solve(std::span<Complex> rhs) const;

 private:
  Complex& at(int i, int j);

  int n_;
  int kl_;
  int ku_;
  int ldab_;
  bool factored_ = false;
  std::vector<Complex> ab_;
  std::vector<int> pivots_;
};

}  // namespace hnls
