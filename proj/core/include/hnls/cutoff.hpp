#pragma once

namespace hnls {

/// Smooth nondecreasing cutoff: 0 for x <= 0, 1 for x >= 1, and
/// eta(x) + eta(1 - x) = 1. Realized as the normalized integral of the bump
/// exp(-1/(s(1-s))).
double eta(double x);

/// d^order eta / dx^order for order 0..4 (analytic from the bump).
double eta_derivative(double x, int order);

}  // namespace hnls
