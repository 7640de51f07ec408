#include "ergo/transition_density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ergo/errors.hpp"
#include "ergo/lyapunov.hpp"
#include "ergo/quadrature.hpp"
#include "ergo/rng.hpp"

namespace ergo {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

struct GaussianKernel {
  Vec mean;               // b_tilde(x)
  Eigen::LLT<Mat> chol;   // of sigma(x) sigma(x)^T tau
  double log_norm = 0.0;  // -(d/2) log(2 pi) - (1/2) log det
};

GaussianKernel make_kernel(const Vec& x, const SodeProblem& problem,
                           const StmConfig& config) {
  const Vec bx = problem.drift(x);
  const Mat sx = problem.diffusion(x);
  if (!bx.allFinite() || !sx.allFinite())
    throw EvaluationError("coefficient evaluated non-finite", x);
  GaussianKernel k;
  k.mean = x + ((1.0 - config.theta) * config.tau) * bx;
  Mat cov = sx * sx.transpose() * config.tau;
  k.chol.compute(cov);
  if (k.chol.info() != Eigen::Success)
    throw NondegeneracyError(
        "sigma(x) sigma(x)^T is not positive definite at the source point");
  double log_det = 0.0;
  for (int i = 0; i < cov.rows(); ++i) {
    const double l = k.chol.matrixL()(i, i);
    if (!(l > 0.0))
      throw NondegeneracyError(
          "sigma(x) sigma(x)^T is not positive definite at the source point");
    log_det += 2.0 * std::log(l);
  }
  k.log_norm = -0.5 * (static_cast<double>(cov.rows()) * kLog2Pi + log_det);
  return k;
}

double density_at(const GaussianKernel& kernel, const Vec& y,
                  const SodeProblem& problem, const StmConfig& config) {
  const Vec by = problem.drift(y);
  if (!by.allFinite())
    throw EvaluationError("drift evaluated non-finite", y);
  const Vec hat_y = y - (config.theta * config.tau) * by;
  const Vec diff = hat_y - kernel.mean;
  const double quad = diff.dot(kernel.chol.solve(diff));

  Mat jac = problem.drift_jacobian(y);
  jac *= -(config.theta * config.tau);
  jac.diagonal().array() += 1.0;
  const double det = jac.determinant();

  const double log_p =
      kernel.log_norm - 0.5 * quad + std::log(std::abs(det));
  return log_p < -745.0 ? 0.0 : std::exp(log_p);
}

// Monotone scalar root-find for hat_b(y) = z; valid because hat_b' >= 1 -
// theta tau L1 / 2 > 0 in d = 1.
double hat_inverse_1d(double z, const SodeProblem& problem,
                      const StmConfig& config) {
  StmStepper stepper(problem, config);
  Vec rhs(1), init(1), out(1);
  rhs(0) = z;
  init(0) = z;
  stepper.implicit_solve(rhs, init, out);
  return out(0);
}

void require_1d(const SodeProblem& problem, const char* what) {
  if (problem.d != 1 || problem.m != 1)
    throw PreconditionError(std::string(what) +
                            " supports d = 1 problems only");
}

struct DensityGrid {
  std::vector<double> y;
  std::vector<double> p;
};

DensityGrid tabulate_density(const Vec& x, const SodeProblem& problem,
                             const StmConfig& config, int grid_points) {
  const GaussianKernel kernel = make_kernel(x, problem, config);
  const double s = kernel.chol.matrixL()(0, 0);
  const double z_lo = kernel.mean(0) - 10.0 * s;
  const double z_hi = kernel.mean(0) + 10.0 * s;
  const double y_lo = hat_inverse_1d(z_lo, problem, config);
  const double y_hi = hat_inverse_1d(z_hi, problem, config);

  DensityGrid grid;
  grid.y.resize(grid_points);
  grid.p.resize(grid_points);
  Vec y(1);
  for (int i = 0; i < grid_points; ++i) {
    const double t = static_cast<double>(i) / (grid_points - 1);
    grid.y[i] = y_lo + t * (y_hi - y_lo);
    y(0) = grid.y[i];
    grid.p[i] = density_at(kernel, y, problem, config);
  }
  return grid;
}

}  // namespace

double transition_density(const Vec& x, const Vec& y,
                          const SodeProblem& problem, const StmConfig& config) {
  problem.validate();
  config.validate();
  if (config.theta > 0.0 && !(problem.L1 * config.theta * config.tau < 2.0))
    throw PreconditionError("transition_density: L1*theta*tau < 2 violated");
  const GaussianKernel kernel = make_kernel(x, problem, config);
  return density_at(kernel, y, problem, config);
}

double density_normalization(const Vec& x, const SodeProblem& problem,
                             const StmConfig& config, double abs_tol) {
  require_1d(problem, "density_normalization");
  const GaussianKernel kernel = make_kernel(x, problem, config);
  const double s = kernel.chol.matrixL()(0, 0);
  const double y_lo = hat_inverse_1d(kernel.mean(0) - 10.0 * s, problem, config);
  const double y_hi = hat_inverse_1d(kernel.mean(0) + 10.0 * s, problem, config);
  Vec point(1);
  const auto f = [&](double yy) {
    point(0) = yy;
    return density_at(kernel, point, problem, config);
  };
  return integrate(f, y_lo, y_hi, abs_tol, 1e-12).value;
}

std::vector<double> density_inverse_cdf_samples(const Vec& x,
                                                const SodeProblem& problem,
                                                const StmConfig& config,
                                                long count, std::uint64_t seed,
                                                int grid_points) {
  require_1d(problem, "density_inverse_cdf_samples");
  if (count < 1)
    throw PreconditionError("density_inverse_cdf_samples: count must be >= 1");
  const DensityGrid grid = tabulate_density(x, problem, config, grid_points);

  // Trapezoid CDF, normalized so the inverse is a true quantile map.
  std::vector<double> cdf(grid.y.size(), 0.0);
  for (std::size_t i = 1; i < grid.y.size(); ++i)
    cdf[i] = cdf[i - 1] + 0.5 * (grid.p[i] + grid.p[i - 1]) *
                              (grid.y[i] - grid.y[i - 1]);
  const double total = cdf.back();
  for (auto& c : cdf) c /= total;

  std::vector<double> samples(static_cast<std::size_t>(count));
  const rng::Stream stream(seed, 0, rng::Domain::kDensitySampling);
  for (long i = 0; i < count; ++i) {
    const double u = stream.uniform(static_cast<std::uint64_t>(i), 0);
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    std::size_t hi = static_cast<std::size_t>(
        std::clamp<std::ptrdiff_t>(it - cdf.begin(), 1,
                                   static_cast<std::ptrdiff_t>(cdf.size()) - 1));
    const std::size_t lo = hi - 1;
    const double span = cdf[hi] - cdf[lo];
    const double t = span > 0.0 ? (u - cdf[lo]) / span : 0.5;
    samples[static_cast<std::size_t>(i)] =
        grid.y[lo] + t * (grid.y[hi] - grid.y[lo]);
  }
  return samples;
}

MinorizationReport minorization_probe(const SodeProblem& problem,
                                      const StmConfig& config, double probe_lo,
                                      double probe_hi, int grid) {
  require_1d(problem, "minorization_probe");
  if (grid < 1) throw PreconditionError("minorization_probe: grid must be >= 1");
  if (probe_hi < probe_lo)
    throw PreconditionError("minorization_probe: empty probe interval");

  MinorizationReport report;
  report.small_set_radius = small_set_radius(problem, config.tau);
  report.grid_resolution = grid;
  report.probe_set = "[" + std::to_string(probe_lo) + "," +
                     std::to_string(probe_hi) + "]";
  if (probe_hi == probe_lo) {
    report.measure_lower_bound = 0.0;
    report.passed = false;
    return report;
  }

  const double r = report.small_set_radius;
  double min_density = std::numeric_limits<double>::infinity();
  Vec x(1), y(1);
  for (int i = 0; i < grid; ++i) {
    x(0) = grid == 1 ? 0.0
                     : -r + 2.0 * r * static_cast<double>(i) / (grid - 1);
    const GaussianKernel kernel = make_kernel(x, problem, config);
    for (int j = 0; j < grid; ++j) {
      // composite midpoint nodes in the probe interval
      y(0) = probe_lo + (probe_hi - probe_lo) *
                            (static_cast<double>(j) + 0.5) / grid;
      min_density =
          std::min(min_density, density_at(kernel, y, problem, config));
    }
  }
  report.measure_lower_bound = (probe_hi - probe_lo) * min_density;
  report.passed = report.measure_lower_bound > 0.0;
  return report;
}

}  // namespace ergo
