#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ergo/theta_scheme.hpp"
#include "ergo/types.hpp"

namespace ergo {

/// A scalar observable of the chain state; states are R^d vectors or
/// spectral coefficient vectors (whose Euclidean norm is the L^2 norm).
struct TestFunctional {
  std::string name;
  std::function<double(const Vec&)> phi;
};

/// exp(-|x|^2), sin(|x|^2), |x|^2 -- the observables of the field
/// experiment.
std::vector<TestFunctional> default_functionals();

/// Running averages A(n) = (1/(n - burn_in)) sum_{k=burn_in+1..n} m_k of the
/// per-step values m_k (k = 1..N, m_0 excluded by convention). Entry i of
/// the result is A(burn_in + 1 + i).
std::vector<double> running_time_average(std::span<const double> step_values,
                                         long burn_in = 0);

/// Running averages of phi along a single trajectory.
std::vector<double> time_average(const Trajectory& traj,
                                 const TestFunctional& phi, long burn_in = 0);

struct KdeCurve {
  std::vector<double> x;        // 512-point grid
  std::vector<double> density;  // Gaussian-kernel estimate
  double bandwidth = 0.0;
};

/// Gaussian-kernel density estimate on a 512-point grid spanning
/// [min - 3h, max + 3h]; bandwidth from Silverman's rule when absent.
/// Throws PreconditionError with fewer than 2 distinct samples.
KdeCurve empirical_density(std::span<const double> samples,
                           std::optional<double> bandwidth = std::nullopt);

/// Two-sample Kolmogorov-Smirnov statistic: sup-norm distance between the
/// empirical CDFs, in [0, 1].
double ks_distance(std::vector<double> a, std::vector<double> b);

/// Asymptotic two-sample rejection threshold at significance alpha:
/// c(alpha) sqrt((n+m)/(n m)) with c(alpha) = sqrt(-ln(alpha/2)/2).
double ks_two_sample_threshold(std::size_t n, std::size_t m, double alpha);

}  // namespace ergo
