#include "ergo/spde_scheme.hpp"

#include <cmath>

#include "ergo/errors.hpp"
#include "ergo/parallel.hpp"

namespace ergo {

void SpdeProblem::validate(const SpectralSpace& space) const {
  if (!f || !g) throw PreconditionError("SpdeProblem: f and g are required");
  if (q_spectrum.size() < space.modes())
    throw PreconditionError(
        "SpdeProblem: q_spectrum shorter than the mode count");
  if (q_spectrum.head(space.modes()).minCoeff() <= 0.0)
    throw PreconditionError("SpdeProblem: q_spectrum must be positive");
  if (!(K2 + K7 / 2.0 < space.lambda1()))
    throw PreconditionError("SpdeProblem: K2 + K7/2 < lambda_1 violated");
}

AllenCahnParams allen_cahn_constants(double epsilon, double K2_choice,
                                     const Vec& q_spectrum) {
  if (!(epsilon > 0.0))
    throw PreconditionError("allen_cahn_constants: epsilon must be positive");
  if (!(K2_choice < 0.0))
    throw PreconditionError("allen_cahn_constants: K2 must be negative");
  AllenCahnParams p;
  p.epsilon = epsilon;
  const double inv_eps2 = 1.0 / (epsilon * epsilon);
  p.K1 = inv_eps2;
  p.K2 = K2_choice;
  // max over u >= 0 of (K1 + |K2|) u - K1 u^2 with u = xi^2.
  const double a = inv_eps2 + std::abs(K2_choice);
  p.K3 = a * a * epsilon * epsilon / 4.0;
  p.K4 = 2.0 * inv_eps2;
  p.K5 = inv_eps2;
  p.K6 = 0.0;
  p.K7 = 0.0;
  p.K8 = q_spectrum.sum();
  p.q_growth = 3.0;
  return p;
}

SpdeProblem make_allen_cahn(double epsilon, double K2_choice,
                            const Vec& q_spectrum) {
  const AllenCahnParams params =
      allen_cahn_constants(epsilon, K2_choice, q_spectrum);
  const double inv_eps2 = 1.0 / (epsilon * epsilon);
  SpdeProblem p;
  p.f = [inv_eps2](double u) { return inv_eps2 * (u - u * u * u); };
  p.jac_f = [inv_eps2](double u) { return inv_eps2 * (1.0 - 3.0 * u * u); };
  p.g = [](double) { return 1.0; };
  p.K1 = params.K1;
  p.K2 = params.K2;
  p.K3 = params.K3;
  p.K4 = params.K4;
  p.K5 = params.K5;
  p.q_growth = params.q_growth;
  p.K6 = params.K6;
  p.K7 = params.K7;
  p.K8 = params.K8;
  p.q_spectrum = q_spectrum;
  return p;
}

SpdeProblem make_linear_additive(const Vec& q_spectrum) {
  SpdeProblem p;
  p.f = [](double) { return 0.0; };
  p.jac_f = [](double) { return 0.0; };
  p.g = [](double) { return 1.0; };
  p.K1 = 0.0;
  p.K2 = 0.0;
  p.K3 = 0.0;
  p.K4 = 0.0;
  p.K5 = 0.0;
  p.q_growth = 1.0;
  p.K6 = 0.0;
  p.K7 = 0.0;
  p.K8 = q_spectrum.sum();
  p.q_spectrum = q_spectrum;
  return p;
}

Vec default_q_spectrum(int n, double exponent) {
  Vec q(n);
  for (int k = 1; k <= n; ++k) q(k - 1) = std::pow(k, -exponent);
  return q;
}

SpectralField qwiener_increment(const SpectralSpace& space,
                                const Vec& q_spectrum, double tau,
                                const rng::Stream& stream,
                                std::uint64_t step) {
  const int n = space.modes();
  if (q_spectrum.size() < n)
    throw PreconditionError("qwiener_increment: q_spectrum too short");
  SpectralField dw(n);
  stream.fill_gaussian(step, {dw.data(), static_cast<std::size_t>(n)});
  for (int k = 0; k < n; ++k) dw(k) *= std::sqrt(q_spectrum(k) * tau);
  return dw;
}

SpectralField nemytskii_project(const SpectralField& x,
                                const std::function<double(double)>& f,
                                const SpectralSpace& space) {
  Vec grid_vals(space.collocation_size());
  space.eval_on_grid(x, grid_vals);
  for (int i = 0; i < grid_vals.size(); ++i) {
    grid_vals(i) = f(grid_vals(i));
    if (!std::isfinite(grid_vals(i)))
      throw EvaluationError("reaction evaluated non-finite on the grid", x);
  }
  SpectralField out(space.modes());
  space.project(grid_vals, out);
  return out;
}

DiegStepper::DiegStepper(const SpectralSpace& space, const SpdeProblem& problem,
                         const DiegConfig& config)
    : space_(space), problem_(problem), config_(config) {
  problem_.validate(space_);
  if (!(config_.tau > 0.0) || !(config_.tau < 1.0))
    throw PreconditionError("DiegStepper: tau must lie in (0,1)");
  if (!((problem_.K1 - space_.lambda1()) * config_.tau < 1.0))
    throw PreconditionError("DiegStepper: (K1 - lambda_1) tau < 1 violated");
  const int n = space_.modes();
  const int m = space_.collocation_size();
  one_plus_tau_lambda_ = Vec::Ones(n) + config_.tau * space_.eigenvalues();
  grid_vals_.resize(m);
  grid_fvals_.resize(m);
  noise_grid_.resize(m);
  proj_.resize(n);
  res_.resize(n);
  y_.resize(n);
  trial_.resize(n);
  newton_step_.resize(n);
  rhs_.resize(n);
  jac_.resize(n, n);
}

double DiegStepper::residual(const Vec& y, const Vec& rhs, Vec& res) {
  space_.eval_on_grid(y, grid_vals_);
  for (int i = 0; i < grid_vals_.size(); ++i) {
    grid_fvals_(i) = problem_.f(grid_vals_(i));
    if (!std::isfinite(grid_fvals_(i)))
      throw EvaluationError("reaction evaluated non-finite on the grid", y);
  }
  space_.project(grid_fvals_, proj_);
  res = one_plus_tau_lambda_.cwiseProduct(y) - config_.tau * proj_ - rhs;
  return res.norm();
}

void DiegStepper::implicit_solve(const Vec& rhs, const Vec& y_init, Vec& out) {
  y_ = y_init;
  double rnorm = residual(y_, rhs, res_);

  for (int it = 0; it < config_.newton_max_iter && rnorm > config_.newton_tol;
       ++it) {
    // Jacobian (I + tau Lambda) - tau S^T diag(f'(y(xi))) S / (M+1);
    // grid_vals_ holds y on the grid from the last residual call.
    for (int i = 0; i < grid_vals_.size(); ++i)
      grid_fvals_(i) = problem_.jac_f(grid_vals_(i));
    jac_.noalias() = space_.eval_matrix().transpose() *
                     grid_fvals_.asDiagonal() * space_.eval_matrix();
    jac_ *= -config_.tau / (space_.collocation_size() + 1.0);
    jac_.diagonal() += one_plus_tau_lambda_;
    newton_step_ = jac_.partialPivLu().solve(res_);

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
    if (!improved) break;
  }

  if (rnorm > config_.newton_tol && config_.fixed_point_fallback) {
    // Damped iteration of y = (I + tau Lambda)^{-1} (rhs + tau P_N F(y)).
    for (int it = 0;
         it < config_.fixed_point_max_iter && rnorm > config_.newton_tol;
         ++it) {
      space_.eval_on_grid(y_, grid_vals_);
      for (int i = 0; i < grid_vals_.size(); ++i)
        grid_fvals_(i) = problem_.f(grid_vals_(i));
      space_.project(grid_fvals_, proj_);
      trial_ = (rhs + config_.tau * proj_).cwiseQuotient(one_plus_tau_lambda_);
      y_ = 0.5 * y_ + 0.5 * trial_;
      rnorm = residual(y_, rhs, res_);
      if (!std::isfinite(rnorm))
        throw SolverError("implicit SPDE solve diverged in fallback", rnorm);
    }
  }

  if (rnorm > config_.newton_tol)
    throw SolverError("implicit SPDE solve failed to reach tolerance", rnorm);
  out = y_;
}

void DiegStepper::step(const SpectralField& x, const SpectralField& dW,
                       SpectralField& out) {
  // rhs = x + P_N(g(x(.)) dW(.)), assembled on the collocation grid.
  space_.eval_on_grid(x, grid_vals_);
  space_.eval_on_grid(dW, noise_grid_);
  for (int i = 0; i < grid_vals_.size(); ++i) {
    const double gv = problem_.g(grid_vals_(i));
    if (!std::isfinite(gv))
      throw EvaluationError("diffusion evaluated non-finite on the grid", x);
    noise_grid_(i) *= gv;
  }
  space_.project(noise_grid_, proj_);
  rhs_ = x + proj_;
  implicit_solve(rhs_, x, out);
}

double lyapunov_spde(const SpectralField& x, const SpdeProblem& problem,
                     const SpectralSpace& space, double tau,
                     double eps_margin) {
  if (!(eps_margin > 0.0) || !(eps_margin < space.lambda1() - problem.K2))
    throw PreconditionError(
        "lyapunov_spde: eps_margin must lie in (0, lambda_1 - K2)");
  const double denom =
      (1.0 + 2.0 * (space.lambda1() - problem.K2 - eps_margin) * tau) *
      space.lambda1();
  const double c = 2.0 * eps_margin * tau / denom;
  return space.norm2(x) + c * space.grad_norm2(x) + 1.0;
}

DriftConstants drift_constants_spde(const SpdeProblem& problem,
                                    const SpectralSpace& space, double tau,
                                    double eps_margin) {
  problem.validate(space);
  if (!((problem.K1 - space.lambda1()) * tau < 1.0))
    throw PreconditionError(
        "drift_constants_spde: (K1 - lambda_1) tau < 1 violated");
  if (!(eps_margin > 0.0) || !(eps_margin < space.lambda1() - problem.K2))
    throw PreconditionError(
        "drift_constants_spde: eps_margin must lie in (0, lambda_1 - K2)");
  const double denom =
      1.0 + 2.0 * (space.lambda1() - problem.K2 - eps_margin) * tau;
  DriftConstants out;
  out.rho = (1.0 + problem.K7 * tau) / denom;
  out.kappa = (2.0 * problem.K3 + problem.K8) * tau / denom + (1.0 - out.rho);
  return out;
}

DriftVerdict verify_drift_mc_spde(const SpectralField& x,
                                  const SpdeProblem& problem,
                                  const SpectralSpace& space, double tau,
                                  double eps_margin, long mc_paths,
                                  std::uint64_t seed, int threads) {
  if (mc_paths < 1000)
    throw PreconditionError("verify_drift_mc_spde: mc_paths must be >= 1000");
  DiegConfig config;
  config.tau = tau;

  struct Acc {
    double sum = 0.0, sum_sq = 0.0;
    long count = 0;
  };
  std::vector<Acc> partial(static_cast<std::size_t>(
      (mc_paths + kDefaultBlockSize - 1) / kDefaultBlockSize));

  parallel_blocks(
      mc_paths, kDefaultBlockSize, threads,
      [&](std::int64_t lo, std::int64_t hi, std::int64_t blk) {
        DiegStepper stepper(space, problem, config);
        SpectralField next(space.modes());
        Acc acc;
        for (std::int64_t i = lo; i < hi; ++i) {
          const rng::Stream stream(seed, static_cast<std::uint64_t>(i),
                                   rng::Domain::kPathNoise);
          const SpectralField dw =
              qwiener_increment(space, problem.q_spectrum, tau, stream, 0);
          stepper.step(x, dw, next);
          const double v = lyapunov_spde(next, problem, space, tau, eps_margin);
          acc.sum += v;
          acc.sum_sq += v * v;
          ++acc.count;
        }
        partial[static_cast<std::size_t>(blk)] = acc;
      });

  double sum = 0.0, sum_sq = 0.0;
  long count = 0;
  for (const auto& acc : partial) {
    sum += acc.sum;
    sum_sq += acc.sum_sq;
    count += acc.count;
  }

  DriftVerdict verdict;
  const double n = static_cast<double>(count);
  verdict.lhs_estimate = sum / n;
  const double var = (sum_sq - sum * sum / n) / (n - 1.0);
  verdict.std_error = std::sqrt(std::max(var, 0.0) / n);
  const DriftConstants dc = drift_constants_spde(problem, space, tau, eps_margin);
  verdict.bound =
      dc.rho * lyapunov_spde(x, problem, space, tau, eps_margin) + dc.kappa;
  verdict.passed =
      verdict.lhs_estimate <= verdict.bound + 3.0 * verdict.std_error;
  return verdict;
}

}  // namespace ergo
