#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ergo/sode_problem.hpp"
#include "ergo/theta_scheme.hpp"
#include "ergo/types.hpp"

namespace ergo {

/// One-step transition density of the theta scheme under nondegenerate
/// diffusion:
///   p(x, y) = N(hat_b(y); b_tilde(x), sigma(x) sigma(x)^T tau)
///             * |det(I - theta tau J_b(y))|,
/// with b_tilde(x) = x + (1 - theta) b(x) tau. Evaluated in log space, so
/// far tails underflow cleanly to 0. Throws NondegeneracyError when
/// sigma(x) sigma(x)^T is not positive definite.
double transition_density(const Vec& x, const Vec& y,
                          const SodeProblem& problem, const StmConfig& config);

/// Quadrature of p(x, .) over the +-10-standard-deviation bulk (d = 1).
/// The exact integral is 1; deviations expose density bugs.
double density_normalization(const Vec& x, const SodeProblem& problem,
                             const StmConfig& config, double abs_tol = 1e-9);

/// Draws `count` samples of the one-step law started at x by numerically
/// integrating p(x, .) into a CDF on a fine grid and inverting it against
/// counter-stream uniforms (d = 1). Independent of the stepper's own
/// sampling route.
std::vector<double> density_inverse_cdf_samples(const Vec& x,
                                                const SodeProblem& problem,
                                                const StmConfig& config,
                                                long count, std::uint64_t seed,
                                                int grid_points = 8193);

/// Uniform lower bound on the one-step kernel over a probe interval,
/// witnessing the minorization property of the explicit small set.
struct MinorizationReport {
  double small_set_radius = 0.0;
  double measure_lower_bound = 0.0;
  std::string probe_set;
  int grid_resolution = 0;
  bool passed = false;
};

/// measure_lower_bound = (b - a) * min p(x, y) over a grid of x in the
/// small set C = [-R, R] (R from small_set_radius) and composite-midpoint
/// nodes y in [a, b]. d = 1 only.
MinorizationReport minorization_probe(const SodeProblem& problem,
                                      const StmConfig& config, double probe_lo,
                                      double probe_hi, int grid);

}  // namespace ergo
