#pragma once

#include <string>
#include <vector>

#include "ergo/sode_problem.hpp"
#include "ergo/types.hpp"

namespace ergo {

enum class AssumptionId { A1, A2, A3i, LemmaInSTM };

std::string to_string(AssumptionId id);

/// Result of sampling one structural inequality over a box. worst_margin is
/// the most negative slack seen; worst_point holds the sample(s) attaining
/// it (a pair for A1, a single point otherwise).
struct AssumptionReport {
  AssumptionId id = AssumptionId::A1;
  bool passed = false;
  double worst_margin = 0.0;
  std::vector<Vec> worst_point;
  long samples_used = 0;

  /// "assumption_id,passed,worst_margin,samples_used"
  std::string csv_row() const;
};

inline constexpr double kDefaultCheckTolerance = 1e-10;

/// Margin at a pair: L1 |x-y|^2 - 2<b(x)-b(y), x-y> - |sigma(x)-sigma(y)|^2.
AssumptionReport check_monotonicity(const SodeProblem& problem,
                                    const SampleSpec& sampler,
                                    double tolerance = kDefaultCheckTolerance,
                                    int threads = 1);

/// Margin at a point: L2 - L3 |x|^2 - 2<b(x), x> - |sigma(x)|^2.
AssumptionReport check_coercivity(const SodeProblem& problem,
                                  const SampleSpec& sampler,
                                  double tolerance = kDefaultCheckTolerance,
                                  int threads = 1);

/// Margin at a point: smallest eigenvalue of sigma(x) sigma(x)^T. Positive
/// definiteness is strict, so this check passes only when the margin stays
/// strictly above the tolerance.
AssumptionReport check_nondegeneracy(const SodeProblem& problem,
                                     const SampleSpec& sampler,
                                     double tolerance = kDefaultCheckTolerance,
                                     int threads = 1);

/// One-parameter family of inequalities behind the scheme's Lyapunov
/// bookkeeping: with C = (1 + beta L3) / (1 + rho L3),
///   |x - beta b|^2 + beta L2 + (C rho - beta)|sigma|^2
///     <= C (|x - rho b|^2 + rho L2)
/// for any rho >= beta >= 0. Margin = RHS - LHS.
AssumptionReport check_lemma_inequality(const SodeProblem& problem, double rho,
                                        double beta, const SampleSpec& sampler,
                                        double tolerance = kDefaultCheckTolerance,
                                        int threads = 1);

}  // namespace ergo
