#include <doctest.h>

#include <cmath>

#include "ergo/quadrature.hpp"

using namespace ergo;

TEST_CASE("polynomials are integrated exactly") {
  const auto r = integrate([](double x) { return x * x; }, 0.0, 1.0);
  CHECK(r.value == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  const auto r2 = integrate([](double x) { return 3 * x * x - 2 * x + 1; },
                            -2.0, 3.0);
  CHECK(r2.value == doctest::Approx(35.0 - 5.0 + 5.0).epsilon(1e-14));
}

TEST_CASE("gaussian bulk mass matches erf") {
  const auto f = [](double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * 3.14159265358979323846);
  };
  const auto r = integrate(f, -5.0, 5.0, 1e-12);
  CHECK(r.value == doctest::Approx(std::erf(5.0 / std::sqrt(2.0)))
                       .epsilon(1e-12));
}

TEST_CASE("adaptive bisection resolves an integrable spike") {
  const double a = 1e-4;
  const auto f = [a](double x) { return 1.0 / std::sqrt(x + a); };
  const auto r = integrate(f, 0.0, 1.0, 1e-10);
  const double exact = 2.0 * (std::sqrt(1.0 + a) - std::sqrt(a));
  CHECK(r.value == doctest::Approx(exact).epsilon(1e-9));
  CHECK(r.evaluations > 15);  // forced to subdivide
}

TEST_CASE("degenerate interval integrates to zero") {
  const auto r = integrate([](double x) { return x; }, 2.0, 2.0);
  CHECK(r.value == 0.0);
}
