#pragma once

#include <memory>
#include <span>
#include <vector>

#include "hnls/grid.hpp"

namespace hnls {

/// Planned complex 1-D DFT of fixed length. forward: X_k = sum_j x_j e^{-2 pi i jk/n};
/// inverse includes the 1/n factor so inverse(forward(x)) == x.
class Fft {
 public:
  explicit Fft(int n);
  ~Fft();
  Fft(Fft&&) noexcept;
  Fft& operator=(Fft&&) noexcept;
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  int size() const { return n_; }
  void forward(std::span<const Complex> in, std::span<Complex> out) const;
  void inverse(std::span<const Complex> in, std::span<Complex> out) const;
  std::vector<Complex> forward(std::span<const Complex> in) const;
  std::vector<Complex> inverse(std::span<const Complex> in) const;

 private:
  struct Plans;
  int n_;
  std::unique_ptr<Plans> plans_;
};

/// Angular frequencies 2 pi k / (n h) in FFT order (k = 0..n/2-1, -n/2..-1).
std::vector<double> fft_frequencies(int n, double spacing);

}  // namespace hnls
