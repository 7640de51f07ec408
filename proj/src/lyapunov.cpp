#include "ergo/lyapunov.hpp"

#include <cmath>
#include <mutex>

#include "ergo/csv.hpp"
#include "ergo/errors.hpp"
#include "ergo/parallel.hpp"

namespace ergo {

LyapunovSpec LyapunovSpec::with_default_lambda(double theta, double tau) {
  LyapunovSpec spec;
  spec.theta = theta;
  spec.lambda = theta == 0.5 ? 0.0 : 2.0 * theta - 1.0;
  spec.tau = tau;
  return spec;
}

void LyapunovSpec::validate() const {
  if (!(tau > 0.0) || !(tau < 1.0))
    throw PreconditionError("LyapunovSpec: tau must lie in (0,1)");
  if (!(theta >= 0.5 && theta <= 1.0))
    throw PreconditionError("LyapunovSpec: theta must lie in [1/2,1]");
  if (theta == 0.5) {
    if (lambda != 0.0)
      throw PreconditionError("LyapunovSpec: lambda must be 0 when theta=1/2");
  } else if (!(lambda > 0.0) || !(lambda <= 2.0 * theta - 1.0)) {
    throw PreconditionError(
        "LyapunovSpec: lambda must lie in (0, 2*theta-1]");
  }
}

double v_theta(const Vec& x, const SodeProblem& problem,
               const LyapunovSpec& spec) {
  spec.validate();
  if (!(spec.theta > 0.5))
    throw PreconditionError("v_theta requires theta > 1/2; use v_half");
  const Vec bx = problem.drift(x);
  const Mat sx = problem.diffusion(x);
  if (!bx.allFinite() || !sx.allFinite())
    throw EvaluationError("coefficient evaluated non-finite", x);
  const double w = 1.0 - spec.theta + spec.lambda;
  return (x - (w * spec.tau) * bx).squaredNorm() +
         (2.0 * spec.theta - 1.0 - spec.lambda) * sx.squaredNorm() * spec.tau +
         1.0;
}

double v_half(const Vec& x, const SodeProblem& problem, double tau) {
  if (!(tau > 0.0) || !(tau < 1.0))
    throw PreconditionError("v_half: tau must lie in (0,1)");
  const Vec bx = problem.drift(x);
  if (!bx.allFinite())
    throw EvaluationError("drift evaluated non-finite", x);
  return (x - (0.5 * tau) * bx).squaredNorm() + 1.0;
}

DriftConstants drift_constants(const SodeProblem& problem,
                               const LyapunovSpec& spec) {
  spec.validate();
  if (!(spec.theta > 0.5))
    throw PreconditionError("drift_constants requires theta in (1/2,1]");
  problem.validate();
  const double denom =
      1.0 + (1.0 - spec.theta + spec.lambda) * problem.L3 * spec.tau;
  DriftConstants out;
  out.rho = (1.0 + (1.0 - spec.theta) * problem.L3 * spec.tau) / denom;
  out.kappa =
      problem.L2 * spec.tau + spec.lambda * problem.L3 * spec.tau / denom;
  return out;
}

namespace {

struct MeanAccumulator {
  double sum = 0.0;
  double sum_sq = 0.0;
  long count = 0;

  void add(double v) {
    sum += v;
    sum_sq += v * v;
    ++count;
  }
  void merge(const MeanAccumulator& other) {
    sum += other.sum;
    sum_sq += other.sum_sq;
    count += other.count;
  }
  double mean() const { return sum / static_cast<double>(count); }
  double std_error() const {
    if (count < 2) return 0.0;
    const double n = static_cast<double>(count);
    const double var = (sum_sq - sum * sum / n) / (n - 1.0);
    return std::sqrt(std::max(var, 0.0) / n);
  }
};

double lyapunov_value(const Vec& x, const SodeProblem& problem,
                      const LyapunovSpec& spec) {
  return spec.theta == 0.5 ? v_half(x, problem, spec.tau)
                           : v_theta(x, problem, spec);
}

}  // namespace

DriftVerdict verify_drift_mc(const Vec& x, const SodeProblem& problem,
                             const LyapunovSpec& spec, long mc_paths,
                             std::uint64_t seed, int threads) {
  spec.validate();
  if (mc_paths < 1000)
    throw PreconditionError("verify_drift_mc: mc_paths must be >= 1000");
  StmConfig config;
  config.theta = spec.theta;
  config.tau = spec.tau;

  std::vector<MeanAccumulator> partial(
      static_cast<std::size_t>((mc_paths + kDefaultBlockSize - 1) /
                               kDefaultBlockSize));
  parallel_blocks(mc_paths, kDefaultBlockSize, threads,
                  [&](std::int64_t lo, std::int64_t hi, std::int64_t blk) {
                    StmStepper stepper(problem, config);
                    Vec dw(problem.m), next(problem.d);
                    MeanAccumulator acc;
                    for (std::int64_t i = lo; i < hi; ++i) {
                      GaussianIncrements inc(seed, static_cast<std::uint64_t>(i),
                                             config.tau);
                      inc.fill(0, dw);
                      stepper.step(x, dw, next);
                      acc.add(lyapunov_value(next, problem, spec));
                    }
                    partial[static_cast<std::size_t>(blk)] = acc;
                  });
  MeanAccumulator total;
  for (const auto& acc : partial) total.merge(acc);

  DriftVerdict verdict;
  verdict.lhs_estimate = total.mean();
  verdict.std_error = total.std_error();
  if (spec.theta == 0.5) {
    verdict.bound = v_half(x, problem, spec.tau) + problem.L2 * spec.tau -
                    problem.L3 * x.squaredNorm() * spec.tau;
  } else {
    const DriftConstants dc = drift_constants(problem, spec);
    verdict.bound = dc.rho * v_theta(x, problem, spec) + dc.kappa;
  }
  verdict.passed =
      verdict.lhs_estimate <= verdict.bound + 3.0 * verdict.std_error;
  return verdict;
}

std::vector<DecayPoint> verify_geometric_decay(const Vec& x0,
                                               const SodeProblem& problem,
                                               const LyapunovSpec& spec, long n,
                                               long mc_paths,
                                               std::uint64_t seed,
                                               int threads) {
  spec.validate();
  if (!(spec.theta > 0.5))
    throw PreconditionError("verify_geometric_decay requires theta > 1/2");
  if (n < 0) throw PreconditionError("verify_geometric_decay: n must be >= 0");
  StmConfig config;
  config.theta = spec.theta;
  config.tau = spec.tau;

  const std::size_t n_levels = static_cast<std::size_t>(n) + 1;
  const std::int64_t n_blocks =
      (mc_paths + kDefaultBlockSize - 1) / kDefaultBlockSize;
  std::vector<std::vector<MeanAccumulator>> partial(
      static_cast<std::size_t>(n_blocks),
      std::vector<MeanAccumulator>(n_levels));

  parallel_blocks(
      mc_paths, kDefaultBlockSize, threads,
      [&](std::int64_t lo, std::int64_t hi, std::int64_t blk) {
        StmStepper stepper(problem, config);
        Vec dw(problem.m), state(problem.d), next(problem.d);
        auto& acc = partial[static_cast<std::size_t>(blk)];
        for (std::int64_t i = lo; i < hi; ++i) {
          GaussianIncrements inc(seed, static_cast<std::uint64_t>(i),
                                 config.tau);
          state = x0;
          acc[0].add(lyapunov_value(state, problem, spec));
          for (long k = 1; k <= n; ++k) {
            inc.fill(k - 1, dw);
            try {
              stepper.step(state, dw, next);
            } catch (const SolverError& e) {
              throw e.with_step(k - 1);
            }
            state = next;
            acc[static_cast<std::size_t>(k)].add(
                lyapunov_value(state, problem, spec));
          }
        }
      });

  std::vector<MeanAccumulator> total(n_levels);
  for (const auto& block : partial)
    for (std::size_t k = 0; k < n_levels; ++k) total[k].merge(block[k]);

  const DriftConstants dc = drift_constants(problem, spec);
  const double v0 = v_theta(x0, problem, spec);
  const double tail = dc.kappa / (1.0 - dc.rho);

  std::vector<DecayPoint> out(n_levels);
  double rho_pow = 1.0;
  for (std::size_t k = 0; k < n_levels; ++k) {
    out[k].n = static_cast<long>(k);
    out[k].ev_estimate = total[k].mean();
    out[k].std_error = total[k].std_error();
    out[k].bound = rho_pow * v0 + tail;
    out[k].passed =
        out[k].ev_estimate <= out[k].bound + 3.0 * out[k].std_error;
    rho_pow *= dc.rho;
  }
  return out;
}

double small_set_radius(const SodeProblem& problem, double tau) {
  problem.validate();
  if (!(tau > 0.0) || !(tau < 1.0))
    throw PreconditionError("small_set_radius: tau must lie in (0,1)");
  return std::sqrt((problem.L2 * tau + 1.0) / (problem.L3 * tau));
}

std::string drift_verdict_csv_row(double x, double v,
                                  const DriftVerdict& verdict) {
  return csv::fmt(x) + "," + csv::fmt(v) + "," + csv::fmt(verdict.lhs_estimate) +
         "," + csv::fmt(verdict.std_error) + "," + csv::fmt(verdict.bound) +
         "," + (verdict.passed ? "true" : "false");
}

}  // namespace ergo
