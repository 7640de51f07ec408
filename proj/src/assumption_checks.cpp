#include "ergo/assumption_checks.hpp"

#include <cmath>
#include <limits>
#include <mutex>

#include "ergo/csv.hpp"
#include "ergo/errors.hpp"
#include "ergo/parallel.hpp"

namespace ergo {

std::string to_string(AssumptionId id) {
  switch (id) {
    case AssumptionId::A1:
      return "A1";
    case AssumptionId::A2:
      return "A2";
    case AssumptionId::A3i:
      return "A3i";
    case AssumptionId::LemmaInSTM:
      return "LemmaInSTM";
  }
  return "?";
}

std::string AssumptionReport::csv_row() const {
  return to_string(id) + "," + (passed ? "true" : "false") + "," +
         csv::fmt(worst_margin) + "," + std::to_string(samples_used);
}

namespace {

void require_finite(const Vec& value, const Vec& at, const char* what) {
  if (!value.allFinite())
    throw EvaluationError(std::string(what) + " evaluated non-finite", at);
}

void require_finite(const Mat& value, const Vec& at, const char* what) {
  if (!value.allFinite())
    throw EvaluationError(std::string(what) + " evaluated non-finite", at);
}

struct WorstCase {
  double margin = std::numeric_limits<double>::infinity();
  std::vector<Vec> points;
};

// Evaluates margin_fn on every sample and keeps the minimum. Each block
// reduces locally; blocks merge under a mutex, which is order-independent
// because min is commutative.
template <typename MarginFn>
AssumptionReport run_check(AssumptionId id, const SampleSpec& sampler,
                           int copies, int d, double tolerance, int threads,
                           bool strict, MarginFn&& margin_fn) {
  BoxSampler box(sampler, copies);
  WorstCase global;
  std::mutex merge_mutex;

  parallel_blocks(sampler.count, kDefaultBlockSize, threads,
                  [&](std::int64_t lo, std::int64_t hi, std::int64_t) {
                    WorstCase local;
                    Vec sample(box.dims());
                    for (std::int64_t i = lo; i < hi; ++i) {
                      box.draw(i, sample);
                      const double margin = margin_fn(sample);
                      if (margin < local.margin) {
                        local.margin = margin;
                        local.points.clear();
                        for (int c = 0; c < copies; ++c)
                          local.points.push_back(sample.segment(c * d, d));
                      }
                    }
                    std::lock_guard<std::mutex> lock(merge_mutex);
                    if (local.margin < global.margin) global = std::move(local);
                  });

  AssumptionReport report;
  report.id = id;
  report.worst_margin = global.margin;
  report.worst_point = std::move(global.points);
  report.samples_used = sampler.count;
  report.passed = strict ? (report.worst_margin > tolerance)
                         : (report.worst_margin >= -tolerance);
  return report;
}

}  // namespace

AssumptionReport check_monotonicity(const SodeProblem& problem,
                                    const SampleSpec& sampler, double tolerance,
                                    int threads) {
  problem.validate();
  sampler.validate(problem.d);
  if (!std::isfinite(problem.L1))
    throw PreconditionError("check_monotonicity: L1 must be finite");
  const int d = problem.d;
  return run_check(
      AssumptionId::A1, sampler, 2, d, tolerance, threads, false,
      [&](const Vec& xy) {
        const Vec x = xy.head(d);
        const Vec y = xy.tail(d);
        const Vec bx = problem.drift(x);
        const Vec by = problem.drift(y);
        require_finite(bx, x, "drift");
        require_finite(by, y, "drift");
        const Mat sx = problem.diffusion(x);
        const Mat sy = problem.diffusion(y);
        require_finite(sx, x, "diffusion");
        require_finite(sy, y, "diffusion");
        const Vec diff = x - y;
        return problem.L1 * diff.squaredNorm() -
               2.0 * (bx - by).dot(diff) - (sx - sy).squaredNorm();
      });
}

AssumptionReport check_coercivity(const SodeProblem& problem,
                                  const SampleSpec& sampler, double tolerance,
                                  int threads) {
  problem.validate();
  sampler.validate(problem.d);
  return run_check(AssumptionId::A2, sampler, 1, problem.d, tolerance, threads,
                   false, [&](const Vec& x) {
                     const Vec bx = problem.drift(x);
                     require_finite(bx, x, "drift");
                     const Mat sx = problem.diffusion(x);
                     require_finite(sx, x, "diffusion");
                     return problem.L2 - problem.L3 * x.squaredNorm() -
                            2.0 * bx.dot(x) - sx.squaredNorm();
                   });
}

AssumptionReport check_nondegeneracy(const SodeProblem& problem,
                                     const SampleSpec& sampler,
                                     double tolerance, int threads) {
  problem.validate();
  sampler.validate(problem.d);
  return run_check(AssumptionId::A3i, sampler, 1, problem.d, tolerance,
                   threads, /*strict=*/true, [&](const Vec& x) {
                     const Mat sx = problem.diffusion(x);
                     require_finite(sx, x, "diffusion");
                     const Mat a = sx * sx.transpose();
                     Eigen::SelfAdjointEigenSolver<Mat> es(a);
                     return es.eigenvalues().minCoeff();
                   });
}

AssumptionReport check_lemma_inequality(const SodeProblem& problem, double rho,
                                        double beta, const SampleSpec& sampler,
                                        double tolerance, int threads) {
  problem.validate();
  sampler.validate(problem.d);
  if (!(rho >= beta) || !(beta >= 0.0))
    throw PreconditionError(
        "check_lemma_inequality: rho >= beta >= 0 required");
  const double c = (1.0 + beta * problem.L3) / (1.0 + rho * problem.L3);
  return run_check(
      AssumptionId::LemmaInSTM, sampler, 1, problem.d, tolerance, threads,
      false, [&, c](const Vec& x) {
        const Vec bx = problem.drift(x);
        require_finite(bx, x, "drift");
        const Mat sx = problem.diffusion(x);
        require_finite(sx, x, "diffusion");
        const double lhs = (x - beta * bx).squaredNorm() + beta * problem.L2 +
                           (c * rho - beta) * sx.squaredNorm();
        const double rhs =
            c * ((x - rho * bx).squaredNorm() + rho * problem.L2);
        return rhs - lhs;
      });
}

}  // namespace ergo
