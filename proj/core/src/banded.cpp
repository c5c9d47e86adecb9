#include "hnls/banded.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <cstdlib>
#include <string>

#include "hnls/error.hpp"

namespace hnls {

BandedLu::BandedLu(int n, int lower, int upper)
    : n_(n), kl_(lower), ku_(upper), ldab_(2 * lower + upper + 1) {
  require(n > 0 && lower >= 0 && upper >= 0, ErrorCode::kInvalidInput, "bad band dimensions");
  ab_.assign(static_cast<std::size_t>(ldab_) * n_, Complex{});
  pivots_.assign(n_, 0);
}

// LAPACK band storage, column major, with kl extra rows for fill-in.
Complex& BandedLu::at(int i, int j) {
  require(i >= 0 && j >= 0 && i < n_ && j < n_ && i - j <= kl_ && j - i <= ku_, ErrorCode::kInvalidInput,
          "entry outside band");
  return ab_[static_cast<std::size_t>(kl_ + ku_ + i - j) + static_cast<std::size_t>(j) * ldab_];
}

void BandedLu::set(int i, int j, Complex value) {
  require(!factored_, ErrorCode::kInvalidInput, "matrix already factored");
  at(i, j) = value;
}

void BandedLu::add(int i, int j, Complex value) {
  require(!factored_, ErrorCode::kInvalidInput, "matrix already factored");
  at(i, j) += value;
}

void BandedLu::factor() {
  require(!factored_, ErrorCode::kInvalidInput, "matrix already factored");
  const lapack_int info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n_, n_, kl_, ku_,
                                         reinterpret_cast<lapack_complex_double*>(ab_.data()), ldab_,
                                         pivots_.data());
  if (info > 0) fail(ErrorCode::kSingularOperator, "zero pivot in banded LU at row " + std::to_string(info));
  require(info == 0, ErrorCode::kInvalidInput, "zgbtrf rejected its arguments");
  factored_ = true;
}

void BandedLu::solve(std::span<Complex> rhs) const {
  require(factored_, ErrorCode::kInvalidInput, "solve before factor");
  require(static_cast<int>(rhs.size()) == n_, ErrorCode::kInvalidInput, "rhs size mismatch");
  const lapack_int info = LAPACKE_zgbtrs(LAPACK_COL_MAJOR, 'N', n_, kl_, ku_, 1,
                                         reinterpret_cast<const lapack_complex_double*>(ab_.data()), ldab_,
                                         pivots_.data(), reinterpret_cast<lapack_complex_double*>(rhs.data()), n_);
  require(info == 0, ErrorCode::kSingularOperator, "zgbtrs failed");
}

}  // namespace hnls
