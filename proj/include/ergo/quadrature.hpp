#pragma once

#include <functional>

namespace ergo {

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;
};

/// Adaptive Gauss-Kronrod (G7, K15) on [a, b]. Bisects intervals until the
/// summed error estimate falls below abs_tol + rel_tol * |value|.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol = 1e-10, double rel_tol = 1e-12,
                     int max_depth = 30);

}  // namespace ergo
