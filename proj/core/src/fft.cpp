#include "hnls/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>
#include <numbers>

#include "hnls/error.hpp"

namespace hnls {

namespace {
// FFTW's planner is not reentrant.
std::mutex planner_mutex;
}  // namespace

struct Fft::Plans {
  fftw_complex* buffer = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  ~Plans() {
    const std::lock_guard<std::mutex> lock(planner_mutex);
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
    if (buffer) fftw_free(buffer);
  }
};

Fft::Fft(int n) : n_(n), plans_(std::make_unique<Plans>()) {
  require(n > 0, ErrorCode::kInvalidInput, "FFT length must be positive");
  const std::lock_guard<std::mutex> lock(planner_mutex);
  plans_->buffer = fftw_alloc_complex(n);
  // In-place plans on one scratch buffer; ESTIMATE keeps planning deterministic.
  plans_->forward = fftw_plan_dft_1d(n, plans_->buffer, plans_->buffer, FFTW_FORWARD, FFTW_ESTIMATE);
  plans_->backward = fftw_plan_dft_1d(n, plans_->buffer, plans_->buffer, FFTW_BACKWARD, FFTW_ESTIMATE);
  require(plans_->forward && plans_->backward, ErrorCode::kInvalidInput, "FFTW planning failed");
}

Fft::~Fft() = default;
Fft::Fft(Fft&&) noexcept = default;
Fft& Fft::operator=(Fft&&) noexcept = default;

void Fft::forward(std::span<const Complex> in, std::span<Complex> out) const {
  require(static_cast<int>(in.size()) == n_ && static_cast<int>(out.size()) == n_, ErrorCode::kInvalidInput,
          "FFT size mismatch");
  auto* buf = reinterpret_cast<Complex*>(plans_->buffer);
  std::copy(in.begin(), in.end(), buf);
  fftw_execute(plans_->forward);
  std::copy(buf, buf + n_, out.begin());
}

void Fft::inverse(std::span<const Complex> in, std::span<Complex> out) const {
  require(static_cast<int>(in.size()) == n_ && static_cast<int>(out.size()) == n_, ErrorCode::kInvalidInput,
          "FFT size mismatch");
  auto* buf = reinterpret_cast<Complex*>(plans_->buffer);
  std::copy(in.begin(), in.end(), buf);
  fftw_execute(plans_->backward);
  const double scale = 1.0 / n_;
  for (int k = 0; k < n_; ++k) out[k] = buf[k] * scale;
}

std::vector<Complex> Fft::forward(std::span<const Complex> in) const {
  std::vector<Complex> out(n_);
  forward(in, out);
  return out;
}

std::vector<Complex> Fft::inverse(std::span<const Complex> in) const {
  std::vector<Complex> out(n_);
  inverse(in, out);
  return out;
}

std::vector<double> fft_frequencies(int n, double spacing) {
  std::vector<double> xi(n);
  const double base = 2.0 * std::numbers::pi / (n * spacing);
  for (int k = 0; k < n; ++k) xi[k] = base * (k < (n + 1) / 2 ? k : k - n);
  return xi;
}

}  // namespace hnls
