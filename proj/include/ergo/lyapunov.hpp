#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ergo/sode_problem.hpp"
#include "ergo/theta_scheme.hpp"
#include "ergo/types.hpp"

namespace ergo {

/// Parameters of the scheme-adapted Lyapunov function
///   V_theta(x) = |x - (1-theta+lambda) b(x) tau|^2
///                + (2 theta - 1 - lambda) |sigma(x)|^2 tau + 1,
/// defined for theta in (1/2, 1] with lambda in (0, 2 theta - 1]. At
/// theta = 1/2 the weak variant V_half applies and lambda is fixed to 0.
struct LyapunovSpec {
  double theta = 1.0;
  double lambda = 1.0;
  double tau = 0.1;

  /// lambda = 2 theta - 1, the largest admissible value; it maximizes the
  /// one-step contraction.
  static LyapunovSpec with_default_lambda(double theta, double tau);
  void validate() const;
};

/// One-step drift pair: E[V(X_{n+1}) | F_n] <= rho V(X_n) + kappa with
///   rho   = (1 + (1-theta) L3 tau) / (1 + (1-theta+lambda) L3 tau)
///   kappa = L2 tau + lambda L3 tau / (1 + (1-theta+lambda) L3 tau).
struct DriftConstants {
  double rho = 0.0;
  double kappa = 0.0;
};

struct DriftVerdict {
  double lhs_estimate = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
  bool passed = false;
};

double v_theta(const Vec& x, const SodeProblem& problem,
               const LyapunovSpec& spec);

/// V_{1/2}(x) = |x - (tau/2) b(x)|^2 + 1.
double v_half(const Vec& x, const SodeProblem& problem, double tau);

DriftConstants drift_constants(const SodeProblem& problem,
                               const LyapunovSpec& spec);

/// Monte Carlo check of the one-step drift inequality at a fixed state x:
/// the sample mean of V over mc_paths independent one-step transitions must
/// stay below the closed-form bound plus a 3-standard-error band. For
/// theta = 1/2 the bound is V_half(x) + L2 tau - L3 |x|^2 tau.
DriftVerdict verify_drift_mc(const Vec& x, const SodeProblem& problem,
                             const LyapunovSpec& spec, long mc_paths,
                             std::uint64_t seed, int threads = 1);

struct DecayPoint {
  long n = 0;
  double ev_estimate = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
  bool passed = false;
};

/// Tracks E V_theta(X_k) along mc_paths simulated paths from x0 and compares
/// each k against rho^k V_theta(x0) + kappa / (1 - rho).
std::vector<DecayPoint> verify_geometric_decay(const Vec& x0,
                                               const SodeProblem& problem,
                                               const LyapunovSpec& spec, long n,
                                               long mc_paths,
                                               std::uint64_t seed,
                                               int threads = 1);

/// Radius of the explicit compact small set {|x|^2 <= (L2 tau + 1)/(L3 tau)}.
double small_set_radius(const SodeProblem& problem, double tau);

/// "x,V,lhs_estimate,std_error,bound,passed" (x printed for d = 1).
std::string drift_verdict_csv_row(double x, double v,
                                  const DriftVerdict& verdict);

}  // namespace ergo
