#include "ergo/quadrature.hpp"

#include <array>
#include <cmath>

namespace ergo {

namespace {

// QUADPACK dqk15 abscissae/weights on [-1, 1]; the Gauss-7 nodes are the
// odd-indexed Kronrod nodes.
constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
  double gauss = 0.0;
  double kronrod = 0.0;
};

Panel evaluate_panel(const std::function<double(double)>& f, double a,
                     double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  Panel p;
  for (int i = 0; i < 8; ++i) {
    const double dx = half * kKronrodNodes[i];
    const double fsum =
        (i == 7) ? f(mid) : f(mid - dx) + f(mid + dx);
    p.kronrod += kKronrodWeights[i] * fsum;
    if (i % 2 == 1) p.gauss += kGaussWeights[i / 2] * fsum;
  }
  p.gauss *= half;
  p.kronrod *= half;
  return p;
}

void refine(const std::function<double(double)>& f, double a, double b,
            const Panel& panel, double tol, int depth, QuadResult& out) {
  const double err = std::abs(panel.kronrod - panel.gauss);
  if (err <= tol || depth <= 0) {
    out.value += panel.kronrod;
    out.error_estimate += err;
    return;
  }
  const double mid = 0.5 * (a + b);
  const Panel left = evaluate_panel(f, a, mid);
  const Panel right = evaluate_panel(f, mid, b);
  out.evaluations += 30;
  refine(f, a, mid, left, 0.5 * tol, depth - 1, out);
  refine(f, mid, b, right, 0.5 * tol, depth - 1, out);
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol, double rel_tol, int max_depth) {
  QuadResult out;
  if (a == b) return out;
  const Panel top = evaluate_panel(f, a, b);
  out.evaluations = 15;
  const double tol =
      std::max(abs_tol, rel_tol * std::abs(top.kronrod));
  refine(f, a, b, top, tol, max_depth, out);
  return out;
}

}  // namespace ergo
