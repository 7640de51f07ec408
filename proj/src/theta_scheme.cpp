#include "ergo/theta_scheme.hpp"

#include <cmath>

#include "ergo/csv.hpp"
#include "ergo/errors.hpp"

namespace ergo {

void StmConfig::validate() const {
  if (!(theta >= 0.0) || !(theta <= 1.0))
    throw PreconditionError("StmConfig: theta must lie in [0,1]");
  if (!(tau > 0.0) || !(tau < 1.0))
    throw PreconditionError("StmConfig: tau must lie in (0,1)");
  if (!(newton_tol > 0.0))
    throw PreconditionError("StmConfig: newton_tol must be positive");
  if (newton_max_iter < 0)
    throw PreconditionError("StmConfig: newton_max_iter must be >= 0");
}

void Trajectory::write_csv(std::ostream& os) const {
  const int d = states.empty() ? 0 : static_cast<int>(states.front().size());
  os << "step,t";
  for (int j = 1; j <= d; ++j) os << ",x_" << j;
  os << "\n";
  for (std::size_t k = 0; k < states.size(); ++k) {
    os << k << "," << csv::fmt(static_cast<double>(k) * tau);
    for (int j = 0; j < d; ++j) os << "," << csv::fmt(states[k](j));
    os << "\n";
  }
}

StmStepper::StmStepper(const SodeProblem& problem, const StmConfig& config)
    : problem_(problem), config_(config) {
  problem_.validate();
  config_.validate();
  if (config_.theta > 0.0 &&
      !(problem_.L1 * config_.theta * config_.tau < 2.0))
    throw PreconditionError("StmStepper: L1*theta*tau < 2 violated");
  const int d = problem_.d;
  bx_.resize(d);
  res_.resize(d);
  trial_.resize(d);
  newton_step_.resize(d);
  y_.resize(d);
  rhs_.resize(d);
  jac_.resize(d, d);
  sig_.resize(d, problem_.m);
}

void StmStepper::hat_b(const Vec& x, Vec& out) {
  problem_.b(x, bx_);
  if (!bx_.allFinite())
    throw EvaluationError("drift evaluated non-finite", x);
  out = x - (config_.theta * config_.tau) * bx_;
}

double StmStepper::residual(const Vec& y, const Vec& rhs, Vec& res) {
  problem_.b(y, bx_);
  res = y - (config_.theta * config_.tau) * bx_ - rhs;
  return res.norm();
}

void StmStepper::implicit_solve(const Vec& rhs, const Vec& x_init, Vec& out) {
  const double tt = config_.theta * config_.tau;
  if (tt == 0.0) {
    out = rhs;
    return;
  }

  y_ = x_init;
  double rnorm = residual(y_, rhs, res_);
  if (!std::isfinite(rnorm)) {
    y_.setZero();
    rnorm = residual(y_, rhs, res_);
  }

  for (int it = 0; it < config_.newton_max_iter && rnorm > config_.newton_tol;
       ++it) {
    if (problem_.jac_b) {
      problem_.jac_b(y_, jac_);
    } else {
      jac_ = problem_.drift_jacobian(y_);
    }
    jac_ *= -tt;
    jac_.diagonal().array() += 1.0;
    newton_step_ = jac_.partialPivLu().solve(res_);

    // Backtracking on the residual norm; hat_b is monotone, so a decrease
    // direction exists whenever the Jacobian solve is sane.
    double scale = 1.0;
    bool improved = false;
    for (int bt = 0; bt < 30; ++bt) {
      trial_ = y_ - scale * newton_step_;
      const double trial_norm = residual(trial_, rhs, res_);
      if (std::isfinite(trial_norm) && trial_norm < rnorm) {
        y_ = trial_;
        rnorm = trial_norm;
        improved = true;
        break;
      }
      scale *= 0.5;
    }
    if (!improved) break;  // stagnation -> fallback
  }

  if (rnorm > config_.newton_tol && config_.fixed_point_fallback) {
    // Damped iteration of y = rhs + theta tau b(y).
    for (int it = 0;
         it < config_.fixed_point_max_iter && rnorm > config_.newton_tol;
         ++it) {
      problem_.b(y_, bx_);
      trial_ = rhs + tt * bx_;
      y_ = 0.5 * y_ + 0.5 * trial_;
      rnorm = residual(y_, rhs, res_);
      if (!std::isfinite(rnorm))
        throw SolverError("implicit solve diverged in fixed-point fallback",
                          rnorm);
    }
  }

  if (rnorm > config_.newton_tol)
    throw SolverError("implicit solve failed to reach tolerance (residual " +
                          csv::fmt(rnorm) + ")",
                      rnorm);
  out = y_;
}

void StmStepper::step(const Vec& x, const Vec& dW, Vec& out) {
  problem_.b(x, bx_);
  if (!bx_.allFinite())
    throw EvaluationError("drift evaluated non-finite", x);
  problem_.sigma(x, sig_);
  if (!sig_.allFinite())
    throw EvaluationError("diffusion evaluated non-finite", x);
  rhs_ = x + ((1.0 - config_.theta) * config_.tau) * bx_;
  rhs_.noalias() += sig_ * dW;
  if (config_.theta == 0.0) {
    out = rhs_;
    return;
  }
  implicit_solve(rhs_, x, out);
}

Vec hat_b(const Vec& x, const SodeProblem& problem, const StmConfig& config) {
  StmStepper stepper(problem, config);
  Vec out(problem.d);
  stepper.hat_b(x, out);
  return out;
}

Vec implicit_solve(const Vec& rhs, const SodeProblem& problem,
                   const StmConfig& config, const Vec& x_init) {
  StmStepper stepper(problem, config);
  Vec out(problem.d);
  stepper.implicit_solve(rhs, x_init, out);
  return out;
}

Vec step(const Vec& x, const Vec& dW, const SodeProblem& problem,
         const StmConfig& config) {
  StmStepper stepper(problem, config);
  Vec out(problem.d);
  stepper.step(x, dW, out);
  return out;
}

Trajectory simulate_path(const Vec& x0, long n, const SodeProblem& problem,
                         const StmConfig& config,
                         const IncrementSource& increments,
                         std::uint64_t seed_tag) {
  if (n < 0) throw PreconditionError("simulate_path: n must be >= 0");
  StmStepper stepper(problem, config);
  Trajectory traj;
  traj.tau = config.tau;
  traj.seed = seed_tag;
  traj.states.reserve(static_cast<std::size_t>(n) + 1);
  traj.states.push_back(x0);
  Vec dw(problem.m), next(problem.d);
  for (long j = 0; j < n; ++j) {
    increments.fill(j, dw);
    try {
      stepper.step(traj.states.back(), dw, next);
    } catch (const SolverError& e) {
      throw e.with_step(j);
    }
    if (!next.allFinite())
      throw SolverError("non-finite state produced", next.norm(), j);
    traj.states.push_back(next);
  }
  return traj;
}

Trajectory simulate_path(const Vec& x0, long n, const SodeProblem& problem,
                         const StmConfig& config, std::uint64_t seed,
                         std::uint64_t path_id) {
  GaussianIncrements increments(seed, path_id, config.tau);
  return simulate_path(x0, n, problem, config, increments, seed);
}

}  // namespace ergo
