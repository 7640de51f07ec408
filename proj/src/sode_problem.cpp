#include "ergo/sode_problem.hpp"

#include <cmath>

#include "ergo/errors.hpp"
#include "ergo/rng.hpp"

namespace ergo {

Vec SodeProblem::drift(const Vec& x) const {
  Vec out(d);
  b(x, out);
  return out;
}

Mat SodeProblem::diffusion(const Vec& x) const {
  Mat out(d, m);
  sigma(x, out);
  return out;
}

Mat SodeProblem::drift_jacobian(const Vec& x) const {
  Mat out(d, d);
  if (jac_b) {
    jac_b(x, out);
    return out;
  }
  constexpr double h = 1e-6;
  Vec xp = x, xm = x, bp(d), bm(d);
  for (int j = 0; j < d; ++j) {
    xp(j) = x(j) + h;
    xm(j) = x(j) - h;
    b(xp, bp);
    b(xm, bm);
    out.col(j) = (bp - bm) / (2.0 * h);
    xp(j) = x(j);
    xm(j) = x(j);
  }
  return out;
}

void SodeProblem::validate() const {
  if (d < 1 || m < 1)
    throw PreconditionError("SodeProblem: dimensions must be positive");
  if (!b || !sigma)
    throw PreconditionError("SodeProblem: drift and diffusion are required");
  if (!(L2 > 0.0) || !(L3 > 0.0))
    throw PreconditionError("SodeProblem: L2 and L3 must be positive");
}

SodeProblem example1_problem() {
  SodeProblem p;
  p.d = 1;
  p.m = 1;
  p.b = [](const Vec& x, Vec& out) { out(0) = x(0) - x(0) * x(0) * x(0); };
  p.sigma = [](const Vec& x, Mat& out) {
    out(0, 0) = std::sqrt(x(0) * x(0) + 1.0);
  };
  p.jac_b = [](const Vec& x, Mat& out) { out(0, 0) = 1.0 - 3.0 * x(0) * x(0); };
  p.L1 = 3.0;
  p.L2 = 3.0;
  p.L3 = 1.0;
  return p;
}

SodeProblem double_well_additive_problem() {
  SodeProblem p;
  p.d = 1;
  p.m = 1;
  p.b = [](const Vec& x, Vec& out) { out(0) = x(0) - x(0) * x(0) * x(0); };
  p.sigma = [](const Vec&, Mat& out) { out(0, 0) = 1.0; };
  p.jac_b = [](const Vec& x, Mat& out) { out(0, 0) = 1.0 - 3.0 * x(0) * x(0); };
  p.L1 = 2.0;
  // 2<b(x),x> + 1 = 3x^2 - 2x^4 + 1 peaks at x^2 = 3/4: value 17/8.
  p.L2 = 17.0 / 8.0;
  p.L3 = 1.0;
  return p;
}

SodeProblem problem_preset(std::string_view name) {
  if (name == "example1") return example1_problem();
  if (name == "double-well-additive") return double_well_additive_problem();
  throw PreconditionError("unknown problem preset: " + std::string(name));
}

SampleSpec SampleSpec::cube(int d, double lo, double hi, long count,
                            std::uint64_t seed) {
  SampleSpec s;
  s.box_lo = Vec::Constant(d, lo);
  s.box_hi = Vec::Constant(d, hi);
  s.count = count;
  s.seed = seed;
  return s;
}

void SampleSpec::validate(int d) const {
  if (box_lo.size() != d || box_hi.size() != d)
    throw PreconditionError("SampleSpec: box dimension mismatch");
  if ((box_hi - box_lo).minCoeff() < 0.0)
    throw PreconditionError("SampleSpec: box_hi must dominate box_lo");
  if (count < 1) throw PreconditionError("SampleSpec: count must be >= 1");
}

namespace {

// Root of x^{m+1} = x + 1; generalizes the golden ratio and gives the
// R_m Kronecker sequence increments.
double generalized_golden_ratio(int m) {
  double x = 1.5;
  for (int i = 0; i < 64; ++i) {
    const double f = std::pow(x, m + 1) - x - 1.0;
    const double fp = (m + 1) * std::pow(x, m) - 1.0;
    x -= f / fp;
  }
  return x;
}

}  // namespace

BoxSampler::BoxSampler(const SampleSpec& spec, int copies)
    : count_(spec.count), seed_(spec.seed) {
  const int d = static_cast<int>(spec.box_lo.size());
  const int dims = d * copies;
  lo_.resize(dims);
  span_.resize(dims);
  for (int j = 0; j < dims; ++j) {
    lo_(j) = spec.box_lo(j % d);
    span_(j) = spec.box_hi(j % d) - spec.box_lo(j % d);
  }
  alpha_.resize(dims);
  const double phi = generalized_golden_ratio(dims);
  double a = 1.0;
  for (int j = 0; j < dims; ++j) {
    a /= phi;
    alpha_(j) = a;
  }
}

void BoxSampler::draw(long index, Vec& out) const {
  const int dims = static_cast<int>(alpha_.size());
  const long half = count_ / 2;
  if (index < half) {
    // Kronecker sequence: frac(0.5 + n * alpha).
    const double n = static_cast<double>(index + 1);
    for (int j = 0; j < dims; ++j) {
      double u = 0.5 + n * alpha_(j);
      u -= std::floor(u);
      out(j) = lo_(j) + span_(j) * u;
    }
    return;
  }
  const rng::Stream stream(seed_, static_cast<std::uint64_t>(index),
                           rng::Domain::kSampler);
  for (int j = 0; j < dims; ++j)
    out(j) = lo_(j) + span_(j) * stream.uniform(0, static_cast<std::uint32_t>(j));
}

}  // namespace ergo
