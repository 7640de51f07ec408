#include "ergo/stats.hpp"

#include <algorithm>
#include <cmath>

#include "ergo/errors.hpp"

namespace ergo {

namespace {
constexpr double kSqrt2Pi = 2.50662827463100050241576528481104525;
}

std::vector<TestFunctional> default_functionals() {
  return {
      {"exp_neg_norm2",
       [](const Vec& x) { return std::exp(-x.squaredNorm()); }},
      {"sin_norm2", [](const Vec& x) { return std::sin(x.squaredNorm()); }},
      {"norm2", [](const Vec& x) { return x.squaredNorm(); }},
  };
}

std::vector<double> running_time_average(std::span<const double> step_values,
                                         long burn_in) {
  const long n_steps = static_cast<long>(step_values.size());
  if (burn_in < 0 || burn_in >= n_steps)
    throw PreconditionError("running_time_average: burn_in must be < n");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_steps - burn_in));
  double sum = 0.0;
  for (long k = burn_in; k < n_steps; ++k) {
    sum += step_values[static_cast<std::size_t>(k)];
    out.push_back(sum / static_cast<double>(k - burn_in + 1));
  }
  return out;
}

std::vector<double> time_average(const Trajectory& traj,
                                 const TestFunctional& phi, long burn_in) {
  // States X_1..X_n enter the average; X_0 is the initial datum.
  std::vector<double> values;
  values.reserve(traj.states.size() - 1);
  for (std::size_t k = 1; k < traj.states.size(); ++k) {
    const double v = phi.phi(traj.states[k]);
    if (!std::isfinite(v))
      throw EvaluationError("functional evaluated non-finite",
                            traj.states[k]);
    values.push_back(v);
  }
  return running_time_average(values, burn_in);
}

KdeCurve empirical_density(std::span<const double> samples,
                           std::optional<double> bandwidth) {
  const std::size_t n = samples.size();
  if (n < 2) throw PreconditionError("empirical_density: need >= 2 samples");

  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back())
    throw PreconditionError(
        "empirical_density: fewer than 2 distinct samples (zero bandwidth)");

  double h;
  if (bandwidth) {
    h = *bandwidth;
    if (!(h > 0.0))
      throw PreconditionError("empirical_density: bandwidth must be positive");
  } else {
    // Silverman: 0.9 min(sd, IQR/1.34) n^{-1/5}, guarding degenerate spread.
    double mean = 0.0;
    for (double s : sorted) mean += s;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double s : sorted) ss += (s - mean) * (s - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    const double iqr = sorted[static_cast<std::size_t>(0.75 * (n - 1))] -
                       sorted[static_cast<std::size_t>(0.25 * (n - 1))];
    double spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0)) spread = std::max(sd, iqr / 1.34);
    h = 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
  }

  constexpr int kGridPoints = 512;
  KdeCurve curve;
  curve.bandwidth = h;
  curve.x.resize(kGridPoints);
  curve.density.assign(kGridPoints, 0.0);
  const double lo = sorted.front() - 3.0 * h;
  const double hi = sorted.back() + 3.0 * h;
  const double step = (hi - lo) / (kGridPoints - 1);
  const double norm = 1.0 / (static_cast<double>(n) * h * kSqrt2Pi);
  for (int i = 0; i < kGridPoints; ++i) {
    const double g = lo + i * step;
    curve.x[static_cast<std::size_t>(i)] = g;
    double acc = 0.0;
    for (double s : sorted) {
      const double z = (g - s) / h;
      acc += std::exp(-0.5 * z * z);
    }
    curve.density[static_cast<std::size_t>(i)] = norm * acc;
  }
  return curve;
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw PreconditionError("ks_distance: both sample sets must be nonempty");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

double ks_two_sample_threshold(std::size_t n, std::size_t m, double alpha) {
  const double c = std::sqrt(-std::log(alpha / 2.0) / 2.0);
  return c * std::sqrt(static_cast<double>(n + m) /
                       (static_cast<double>(n) * static_cast<double>(m)));
}

}  // namespace ergo
