#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "ergo/errors.hpp"
#include "ergo/rng.hpp"
#include "ergo/spde_scheme.hpp"
#include "ergo/spectral_space.hpp"

using namespace ergo;

namespace {

constexpr double kSqrt2 = 1.41421356237309504880168872420969808;

// Expands (sum_k s_k sin(k pi xi))^3 into plain sine coefficients via
// sin A sin B sin C = (1/4)[sin(A-B+C) + sin(-A+B+C) + sin(A+B-C)
//                           - sin(A+B+C)].
// Independent of the collocation machinery.
std::vector<double> cubic_sine_expansion(const std::vector<double>& s) {
  const int n = static_cast<int>(s.size());
  std::vector<double> out(static_cast<std::size_t>(3 * n) + 1, 0.0);
  const auto add = [&out](int freq, double w) {
    if (freq < 0) {
      out[static_cast<std::size_t>(-freq)] -= w;
    } else if (freq > 0) {
      out[static_cast<std::size_t>(freq)] += w;
    }
  };
  for (int a = 1; a <= n; ++a)
    for (int b = 1; b <= n; ++b)
      for (int c = 1; c <= n; ++c) {
        const double w = 0.25 * s[a - 1] * s[b - 1] * s[c - 1];
        add(a - b + c, w);
        add(-a + b + c, w);
        add(a + b - c, w);
        add(a + b + c, -w);
      }
  return out;
}

SpectralField orthonormal_from_plain(const std::vector<double>& plain, int n) {
  SpectralField coeffs = SpectralField::Zero(n);
  for (int k = 1; k <= n && k < static_cast<int>(plain.size()); ++k)
    coeffs(k - 1) = plain[static_cast<std::size_t>(k)] / kSqrt2;
  return coeffs;
}

}  // namespace

TEST_CASE("nemytskii projection basics") {
  const SpectralSpace space(6);
  const SpectralField x = sine_sum_field(space, 4);

  SUBCASE("zero reaction maps to the zero field") {
    const SpectralField out =
        nemytskii_project(x, [](double) { return 0.0; }, space);
    CHECK(out.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("identity reaction is the identity on V_N") {
    const SpectralField out =
        nemytskii_project(x, [](double u) { return u; }, space);
    CHECK((out - x).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("non-finite reaction values are reported") {
    CHECK_THROWS_AS(
        nemytskii_project(
            x, [](double u) { return u > 0.0 ? std::nan("") : u; }, space),
        EvaluationError);
  }
}

TEST_CASE("cubing sin(pi xi) produces the 3/4, -1/4 sine pair") {
  const SpectralSpace space(4);
  SpectralField x = SpectralField::Zero(4);
  x(0) = 1.0 / kSqrt2;  // sin(pi xi)
  const SpectralField out =
      nemytskii_project(x, [](double u) { return u * u * u; }, space);
  CHECK(out(0) == doctest::Approx(0.75 / kSqrt2).epsilon(1e-10));
  CHECK(std::abs(out(1)) < 1e-12);
  CHECK(out(2) == doctest::Approx(-0.25 / kSqrt2).epsilon(1e-10));
  CHECK(std::abs(out(3)) < 1e-12);
}

TEST_CASE("cubic projection matches the product-to-sum expansion") {
  const rng::Stream s(41, 0, rng::Domain::kGeneric);
  for (int n = 1; n <= 4; ++n) {
    for (int variant = 0; variant < 2; ++variant) {
      // default M = 4N+1 and the generic 2*(3N)+1 both keep cubics exact
      const SpectralSpace space(n, variant == 0 ? -1 : 2 * 3 * n + 1);
      std::vector<double> plain(static_cast<std::size_t>(n));
      SpectralField x(n);
      for (int k = 0; k < n; ++k) {
        plain[static_cast<std::size_t>(k)] =
            2.0 * s.uniform(static_cast<std::uint64_t>(8 * n + variant),
                            static_cast<std::uint32_t>(k)) -
            1.0;
        x(k) = plain[static_cast<std::size_t>(k)] / kSqrt2;
      }
      const SpectralField got =
          nemytskii_project(x, [](double u) { return u * u * u; }, space);
      const SpectralField expected =
          orthonormal_from_plain(cubic_sine_expansion(plain), n);
      CHECK((got - expected).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("q-Wiener increments") {
  const SpectralSpace space(10);
  const Vec q = default_q_spectrum(10, 2.0);
  const rng::Stream stream(0, 0);

  SUBCASE("tau = 0 gives the zero field") {
    const SpectralField dw = qwiener_increment(space, q, 0.0, stream, 0);
    CHECK(dw.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("per-mode variance and total trace") {
    const double tau = 0.1;
    const long n = 20000;
    Vec second_moment = Vec::Zero(10);
    for (long i = 0; i < n; ++i) {
      const rng::Stream s(7, static_cast<std::uint64_t>(i));
      const SpectralField dw = qwiener_increment(space, q, tau, s, 0);
      second_moment += dw.cwiseProduct(dw);
    }
    second_moment /= static_cast<double>(n);
    const double slack = 5.0 * std::sqrt(2.0 / static_cast<double>(n));
    for (int k = 0; k < 10; ++k) {
      const double expected = q(k) * tau;
      CHECK(std::abs(second_moment(k) - expected) <= slack * expected);
    }
    // partial Basel sum: trace = tau * sum k^-2
    CHECK(second_moment.sum() ==
          doctest::Approx(tau * 1.5497677311665408).epsilon(0.02));
  }
}

TEST_CASE("linear additive step has a mode-wise closed form") {
  const int n = 10;
  const SpectralSpace space(n);
  const Vec q = default_q_spectrum(n, 2.0);
  const SpdeProblem problem = make_linear_additive(q);
  DiegConfig cfg;
  cfg.tau = 0.1;
  DiegStepper stepper(space, problem, cfg);

  const rng::Stream s(43, 0, rng::Domain::kGeneric);
  SpectralField out(n);
  for (int trial = 0; trial < 200; ++trial) {
    SpectralField x(n), dw(n);
    for (int k = 0; k < n; ++k) {
      x(k) = 2.0 * s.uniform(trial, 2 * k) - 1.0;
      dw(k) = 0.5 * (2.0 * s.uniform(trial, 2 * k + 1) - 1.0);
    }
    stepper.step(x, dw, out);
    for (int k = 0; k < n; ++k) {
      const double expected =
          (x(k) + dw(k)) / (1.0 + cfg.tau * space.eigenvalues()(k));
      CHECK(out(k) == doctest::Approx(expected).epsilon(1e-12));
    }
  }

  // e_1 with no noise: 1/(1 + 0.1 pi^2)
  SpectralField e1 = SpectralField::Zero(n);
  e1(0) = 1.0;
  stepper.step(e1, SpectralField::Zero(n), out);
  CHECK(out(0) == doctest::Approx(0.503281).epsilon(1e-6));
}

TEST_CASE("Allen-Cahn zero state is a fixed point of the implicit step") {
  const SpectralSpace space(10);
  const SpdeProblem problem =
      make_allen_cahn(0.5, -1.0, default_q_spectrum(10, 2.0));
  DiegConfig cfg;
  cfg.tau = 0.1;
  DiegStepper stepper(space, problem, cfg);
  SpectralField out(10);
  stepper.step(SpectralField::Zero(10), SpectralField::Zero(10), out);
  CHECK(out.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Allen-Cahn implicit solve agrees with a damped fixed-point oracle") {
  const int n = 10;
  const SpectralSpace space(n);
  const SpdeProblem problem =
      make_allen_cahn(0.5, -1.0, default_q_spectrum(n, 2.0));
  DiegConfig cfg;
  cfg.tau = 0.1;
  DiegStepper stepper(space, problem, cfg);

  SpectralField x = SpectralField::Zero(n);
  x(0) = 1.0 / kSqrt2;  // sin(pi xi)
  SpectralField got(n);
  stepper.step(x, SpectralField::Zero(n), got);

  // Oracle: y <- y/2 + (I + tau Lambda)^{-1}(x + tau P_N F(y))/2, iterated
  // to stationarity from y = x.
  SpectralField y = x;
  for (int it = 0; it < 1000; ++it) {
    const SpectralField fy = nemytskii_project(y, problem.f, space);
    SpectralField target = x + cfg.tau * fy;
    for (int k = 0; k < n; ++k)
      target(k) /= 1.0 + cfg.tau * space.eigenvalues()(k);
    y = 0.5 * y + 0.5 * target;
  }
  CHECK((got - y).cwiseAbs().maxCoeff() < 1e-10);

  // residual check: (I + tau Lambda) y - tau P_N F(y) = x
  const SpectralField fy = nemytskii_project(got, problem.f, space);
  SpectralField res = got;
  for (int k = 0; k < n; ++k)
    res(k) = (1.0 + cfg.tau * space.eigenvalues()(k)) * got(k);
  res -= cfg.tau * fy + x;
  CHECK(res.norm() <= 1e-12);
}

TEST_CASE("projected reaction map is uniformly monotone") {
  const int n = 10;
  const SpectralSpace space(n);
  const SpdeProblem problem =
      make_allen_cahn(0.5, -1.0, default_q_spectrum(n, 2.0));
  const double tau = 0.1;
  const double factor = 1.0 - problem.K1 * tau + space.lambda1() * tau;

  const auto hat_f = [&](const SpectralField& v) {
    SpectralField out = nemytskii_project(v, problem.f, space);
    out *= -tau;
    out += v + tau * space.eigenvalues().cwiseProduct(v);
    return out;
  };

  const rng::Stream s(44, 0, rng::Domain::kGeneric);
  for (int trial = 0; trial < 500; ++trial) {
    SpectralField x(n), y(n);
    for (int k = 0; k < n; ++k) {
      x(k) = 2.0 * s.uniform(trial, 2 * k) - 1.0;
      y(k) = 2.0 * s.uniform(trial, 2 * k + 1) - 1.0;
    }
    const double lhs = (x - y).dot(hat_f(x) - hat_f(y));
    const double rhs = factor * (x - y).squaredNorm();
    CHECK(lhs >= rhs - 1e-9 * (1.0 + std::abs(rhs)));
  }
}

TEST_CASE("spde Lyapunov function values") {
  const SpectralSpace space(10);
  const SpdeProblem problem =
      make_allen_cahn(0.5, -1.0, default_q_spectrum(10, 2.0));

  SUBCASE("zero field evaluates to one") {
    CHECK(lyapunov_spde(SpectralField::Zero(10), problem, space, 0.1, 1.0) ==
          1.0);
  }

  SUBCASE("value at e_1 by direct substitution") {
    SpectralField e1 = SpectralField::Zero(10);
    e1(0) = 1.0;
    const double denom = 1.0 + 2.0 * (space.lambda1() + 1.0 - 1.0) * 0.1;
    const double expected = 2.0 + 0.2 / denom;
    const double got = lyapunov_spde(e1, problem, space, 0.1, 1.0);
    CHECK(got == doctest::Approx(expected).epsilon(1e-14));
    CHECK(got == doctest::Approx(2.067251).epsilon(1e-6));
  }

  SUBCASE("quadratic scaling") {
    const rng::Stream s(45, 0, rng::Domain::kGeneric);
    SpectralField x(10);
    for (int k = 0; k < 10; ++k) x(k) = s.uniform(0, k) - 0.5;
    const double v1 = lyapunov_spde(x, problem, space, 0.1, 1.0);
    const double v2 = lyapunov_spde(2.0 * x, problem, space, 0.1, 1.0);
    CHECK(v2 - 1.0 == doctest::Approx(4.0 * (v1 - 1.0)).epsilon(1e-12));
  }

  SUBCASE("margin domain gate") {
    CHECK_THROWS_AS(
        lyapunov_spde(SpectralField::Zero(10), problem, space, 0.1, 0.0),
        PreconditionError);
    CHECK_THROWS_AS(lyapunov_spde(SpectralField::Zero(10), problem, space, 0.1,
                                  space.lambda1() + 1.5),
                    PreconditionError);
  }
}

TEST_CASE("spde drift constants by direct substitution") {
  const SpectralSpace space(10);
  const Vec q = default_q_spectrum(10, 2.0);
  const SpdeProblem problem = make_allen_cahn(0.5, -1.0, q);

  const DriftConstants dc = drift_constants_spde(problem, space, 0.1, 1.0);
  const double denom = 1.0 + 0.2 * space.lambda1();
  CHECK(dc.rho == doctest::Approx(1.0 / denom).epsilon(1e-14));
  CHECK(dc.rho == doctest::Approx(0.336256).epsilon(1e-6));
  const double kappa_expected =
      (2.0 * 1.5625 + q.sum()) * 0.1 / denom + (1.0 - dc.rho);
  CHECK(dc.kappa == doctest::Approx(kappa_expected).epsilon(1e-14));
  CHECK(std::abs(dc.kappa - 0.820950) < 1e-4);

  SUBCASE("tau -> 0 sends rho to one") {
    const DriftConstants tiny = drift_constants_spde(problem, space, 1e-8, 1.0);
    CHECK(tiny.rho == doctest::Approx(1.0).epsilon(1e-6));
  }

  SUBCASE("constants stay admissible over random parameters") {
    const rng::Stream s(46, 0, rng::Domain::kGeneric);
    for (int i = 0; i < 300; ++i) {
      const double eps = 0.3 + s.uniform(i, 0);
      const double K2 = -2.0 * s.uniform(i, 1) - 0.01;
      const double tau_max =
          std::min(0.999, 0.9 / std::max(1.0 / (eps * eps) - space.lambda1(),
                                         1e-9));
      const double tau = std::max(1e-4, tau_max * s.uniform(i, 2));
      const double margin =
          (space.lambda1() - K2) * std::min(0.999, s.uniform(i, 3) + 1e-3);
      const SpdeProblem pr = make_allen_cahn(eps, K2, q);
      if (!((pr.K1 - space.lambda1()) * tau < 1.0)) continue;
      const DriftConstants c = drift_constants_spde(pr, space, tau, margin);
      CHECK(c.rho > 0.0);
      CHECK(c.rho < 1.0);
      CHECK(c.kappa > 0.0);
    }
  }
}

TEST_CASE("allen_cahn_constants from the quartic maximization") {
  const Vec q = default_q_spectrum(10, 2.0);
  const AllenCahnParams p = allen_cahn_constants(0.5, -1.0, q);
  CHECK(p.K1 == 4.0);
  CHECK(p.K4 == 8.0);
  CHECK(p.K5 == 4.0);
  CHECK(p.K7 == 0.0);
  CHECK(p.K8 == doctest::Approx(q.sum()).epsilon(1e-15));
  CHECK(p.K3 == doctest::Approx(1.5625).epsilon(1e-15));

  // brute-force maximization of (K1+|K2|) xi^2 - K1 xi^4
  double max_val = 0.0;
  for (int i = 0; i <= 300000; ++i) {
    const double xi = -3.0 + 6.0 * i / 300000.0;
    max_val = std::max(max_val, 5.0 * xi * xi - 4.0 * std::pow(xi, 4));
  }
  CHECK(max_val == doctest::Approx(p.K3).epsilon(1e-6));

  // coercivity margin f(xi) xi <= K2 xi^2 + K3 on a wide grid
  const double inv_eps2 = 4.0;
  for (int i = 0; i <= 10000; ++i) {
    const double xi = -10.0 + 20.0 * i / 10000.0;
    const double lhs = inv_eps2 * (xi - xi * xi * xi) * xi;
    CHECK(lhs <= p.K2 * xi * xi + p.K3 + 1e-9);
  }

  CHECK_THROWS_AS(allen_cahn_constants(0.5, 0.5, q), PreconditionError);
  CHECK_THROWS_AS(allen_cahn_constants(-1.0, -1.0, q), PreconditionError);
}

TEST_CASE("problem validation rejects inadmissible constant sets") {
  const SpectralSpace space(10);
  SpdeProblem p = make_linear_additive(default_q_spectrum(10, 2.0));

  SUBCASE("K2 + K7/2 must stay below lambda_1") {
    p.K2 = space.lambda1() + 1.0;
    CHECK_THROWS_AS(p.validate(space), PreconditionError);
    p.K2 = space.lambda1() - 1.0;
    p.K7 = 4.0;  // K2 + K7/2 = lambda_1 + 1
    CHECK_THROWS_AS(p.validate(space), PreconditionError);
  }

  SUBCASE("noise spectrum must cover the modes and stay positive") {
    p.q_spectrum = default_q_spectrum(5, 2.0);
    CHECK_THROWS_AS(p.validate(space), PreconditionError);
    p.q_spectrum = Vec::Zero(10);
    CHECK_THROWS_AS(p.validate(space), PreconditionError);
  }
}

TEST_CASE("field CSV export layouts") {
  const SpectralSpace space(3);
  const SpectralField f = sine_sum_field(space, 1);

  std::ostringstream coeff_os;
  write_field_coeff_csv(coeff_os, f);
  const std::string coeffs = coeff_os.str();
  CHECK(coeffs.rfind("k,coeff\n1,0.7071", 0) == 0);
  CHECK(std::count(coeffs.begin(), coeffs.end(), '\n') == 4);

  std::ostringstream value_os;
  write_field_value_csv(value_os, space, f);
  const std::string values = value_os.str();
  CHECK(values.rfind("xi,u(xi)\n0,0\n", 0) == 0);
  // Dirichlet ends plus M interior nodes
  CHECK(std::count(values.begin(), values.end(), '\n') ==
        space.collocation_size() + 3);
}

TEST_CASE("step-size gate for stiff interfaces") {
  // epsilon = 0.2: K1 = 25, so tau = 0.1 violates (K1 - lambda_1) tau < 1.
  const SpectralSpace space(10);
  const SpdeProblem stiff =
      make_allen_cahn(0.2, -1.0, default_q_spectrum(10, 2.0));
  DiegConfig cfg;
  cfg.tau = 0.1;
  CHECK_THROWS_AS(DiegStepper(space, stiff, cfg), PreconditionError);
  CHECK_THROWS_AS(drift_constants_spde(stiff, space, 0.1, 1.0),
                  PreconditionError);
  // epsilon = 0.5 keeps every tau in (0,1) admissible since K1 < lambda_1.
  const SpdeProblem mild =
      make_allen_cahn(0.5, -1.0, default_q_spectrum(10, 2.0));
  DiegConfig wide;
  wide.tau = 0.99;
  CHECK_NOTHROW(DiegStepper(space, mild, wide));
}

TEST_CASE("drift verdict is exact for the deterministic linear step") {
  const int n = 10;
  const SpectralSpace space(n);
  // vanishing noise (positive spectrum keeps the problem valid)
  const Vec q = Vec::Constant(n, 1e-300);
  const SpdeProblem problem = make_linear_additive(q);
  const double tau = 0.1, margin = 1.0;

  SpectralField x(n);
  for (int k = 0; k < n; ++k) x(k) = 0.3 / (k + 1);
  const DriftVerdict verdict =
      verify_drift_mc_spde(x, problem, space, tau, margin, 1000, 0);

  SpectralField next = x;
  for (int k = 0; k < n; ++k)
    next(k) /= 1.0 + tau * space.eigenvalues()(k);
  const double expected = lyapunov_spde(next, problem, space, tau, margin);
  CHECK(verdict.lhs_estimate == doctest::Approx(expected).epsilon(1e-12));
  CHECK(verdict.std_error < 1e-12);
  CHECK(verdict.passed);
}

TEST_CASE("Allen-Cahn drift inequality holds at a rough initial field") {
  const SpectralSpace space(10);
  const SpdeProblem problem =
      make_allen_cahn(0.5, -1.0, default_q_spectrum(10, 2.0));
  const SpectralField x = sine_sum_field(space, 10);
  const DriftVerdict verdict =
      verify_drift_mc_spde(x, problem, space, 0.1, 1.0, 2000, 0);
  CHECK(verdict.passed);
  CHECK(verdict.lhs_estimate < verdict.bound);
}
