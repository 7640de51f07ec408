#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include "ergo/types.hpp"

namespace ergo {

/// A d-dimensional SDE  dX = b(X) dt + sigma(X) dW  with an m-dimensional
/// driving Wiener process, together with its one-sided monotonicity constant
/// L1 and coercivity constants L2, L3:
///
///   2<b(x)-b(y), x-y> + |sigma(x)-sigma(y)|^2 <= L1 |x-y|^2
///   2<b(x), x>        + |sigma(x)|^2          <= L2 - L3 |x|^2
///
/// Coefficient callbacks write into pre-sized outputs so hot loops stay
/// allocation-free; the drift()/diffusion() wrappers are for convenience.
struct SodeProblem {
  int d = 1;
  int m = 1;
  std::function<void(const Vec&, Vec&)> b;      // out: d
  std::function<void(const Vec&, Mat&)> sigma;  // out: d x m
  std::function<void(const Vec&, Mat&)> jac_b;  // optional; empty -> central FD
  double L1 = 0.0;
  double L2 = 0.0;
  double L3 = 0.0;

  Vec drift(const Vec& x) const;
  Mat diffusion(const Vec& x) const;
  /// Analytic Jacobian when supplied, otherwise central differences with
  /// step 1e-6.
  Mat drift_jacobian(const Vec& x) const;

  void validate() const;  // d, m >= 1 and L2, L3 > 0
};

/// b(x) = x - x^3, sigma(x) = sqrt(x^2 + 1); L1 = 3, L2 = 3, L3 = 1.
SodeProblem example1_problem();

/// b(x) = x - x^3, sigma = 1 (additive); L1 = 2, L2 = 17/8, L3 = 1.
SodeProblem double_well_additive_problem();

/// Presets addressable by name: "example1", "double-well-additive".
/// Throws PreconditionError for unknown names.
SodeProblem problem_preset(std::string_view name);

/// Sampling plan for the assumption checkers: a bounded box, a sample
/// budget, and a seed. Half the budget is spent on a deterministic
/// low-discrepancy (Kronecker) sequence, half on uniform draws, so the
/// checkers both cover the box evenly and keep falsification power.
struct SampleSpec {
  Vec box_lo;
  Vec box_hi;
  long count = 10000;
  std::uint64_t seed = 0;

  static SampleSpec cube(int d, double lo = -10.0, double hi = 10.0,
                         long count = 10000, std::uint64_t seed = 0);
  void validate(int d) const;
};

/// Deterministic point generator over the (possibly repeated) box of a
/// SampleSpec. draw(i, out) is a pure function of (spec, i), so samples can
/// be evaluated in any order or in parallel.
class BoxSampler {
 public:
  BoxSampler(const SampleSpec& spec, int copies = 1);
  void draw(long index, Vec& out) const;
  int dims() const { return static_cast<int>(alpha_.size()); }
  long count() const { return count_; }

 private:
  Vec lo_, span_;  // repeated `copies` times
  Vec alpha_;      // Kronecker increments
  long count_;
  std::uint64_t seed_;
};

}  // namespace ergo
