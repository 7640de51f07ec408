#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <vector>

#include "ergo/rng.hpp"
#include "ergo/sode_problem.hpp"
#include "ergo/types.hpp"

namespace ergo {

/// Parameters of the stochastic theta method
///   X_{j+1} = X_j + (1-theta) b(X_j) tau + theta b(X_{j+1}) tau
///             + sigma(X_j) dW_j.
/// The implicit stage is well posed when L1 * theta * tau < 2, which is
/// enforced at stepper construction.
struct StmConfig {
  double theta = 1.0;
  double tau = 0.1;
  double newton_tol = 1e-12;   // residual norm stopping criterion
  int newton_max_iter = 50;
  bool fixed_point_fallback = true;
  int fixed_point_max_iter = 500;

  void validate() const;
};

struct Trajectory {
  std::vector<Vec> states;  // X_0 .. X_n
  double tau = 0.0;
  std::uint64_t seed = 0;

  long steps() const { return static_cast<long>(states.size()) - 1; }
  /// "step,t,x_1,...,x_d"
  void write_csv(std::ostream& os) const;
};

/// Supplies the Gaussian increments dW_j ~ N(0, tau I_m). The default
/// implementation draws from a counter stream keyed by (seed, path, step);
/// tests may substitute deterministic sources.
class IncrementSource {
 public:
  virtual ~IncrementSource() = default;
  virtual void fill(long step, Vec& dw) const = 0;
};

class GaussianIncrements final : public IncrementSource {
 public:
  GaussianIncrements(std::uint64_t seed, std::uint64_t path_id, double tau)
      : stream_(seed, path_id, rng::Domain::kPathNoise),
        sqrt_tau_(std::sqrt(tau)) {}
  void fill(long step, Vec& dw) const override {
    stream_.fill_gaussian(static_cast<std::uint64_t>(step),
                          {dw.data(), static_cast<std::size_t>(dw.size())});
    dw *= sqrt_tau_;
  }

 private:
  rng::Stream stream_;
  double sqrt_tau_;
};

class ZeroIncrements final : public IncrementSource {
 public:
  void fill(long, Vec& dw) const override { dw.setZero(); }
};

/// One-step integrator with pre-allocated work buffers. Not thread-safe:
/// construct one stepper per worker thread and share nothing.
class StmStepper {
 public:
  StmStepper(const SodeProblem& problem, const StmConfig& config);

  /// hat_b(x) = x - theta tau b(x), the uniformly monotone map whose
  /// inversion advances the implicit stage.
  void hat_b(const Vec& x, Vec& out);

  /// Solves hat_b(y) = rhs by Newton iteration with backtracking, falling
  /// back to a damped fixed-point sweep on stagnation. Throws SolverError
  /// when neither reaches newton_tol.
  void implicit_solve(const Vec& rhs, const Vec& x_init, Vec& out);

  /// One scheme step from x with increment dW (theta = 0 performs no solve).
  void step(const Vec& x, const Vec& dW, Vec& out);

  const SodeProblem& problem() const { return problem_; }
  const StmConfig& config() const { return config_; }

 private:
  double residual(const Vec& y, const Vec& rhs, Vec& res);

  SodeProblem problem_;
  StmConfig config_;
  // scratch
  Vec bx_, res_, trial_, newton_step_, y_, rhs_;
  Mat jac_, sig_;
};

/// Convenience wrappers for one-off evaluations.
Vec hat_b(const Vec& x, const SodeProblem& problem, const StmConfig& config);
Vec implicit_solve(const Vec& rhs, const SodeProblem& problem,
                   const StmConfig& config, const Vec& x_init);
Vec step(const Vec& x, const Vec& dW, const SodeProblem& problem,
         const StmConfig& config);

/// Iterates the scheme n times from x0; states[0] = x0. Deterministic given
/// the increment source. Solver failures are rethrown with the step index.
Trajectory simulate_path(const Vec& x0, long n, const SodeProblem& problem,
                         const StmConfig& config,
                         const IncrementSource& increments,
                         std::uint64_t seed_tag = 0);

/// Counter-stream convenience overload keyed by (seed, path_id, step).
Trajectory simulate_path(const Vec& x0, long n, const SodeProblem& problem,
                         const StmConfig& config, std::uint64_t seed,
                         std::uint64_t path_id);

}  // namespace ergo
