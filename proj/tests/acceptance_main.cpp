// Acceptance suite: one self-contained check per criterion, each printed as
// a single PASS/FAIL line with its runtime. Exit status is the number of
// failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cli_config.hpp"
#include "ergo/assumption_checks.hpp"
#include "ergo/experiments.hpp"
#include "ergo/lyapunov.hpp"
#include "ergo/parallel.hpp"
#include "ergo/spde_scheme.hpp"
#include "ergo/stats.hpp"
#include "ergo/theta_scheme.hpp"
#include "ergo/transition_density.hpp"

using namespace ergo;

namespace {

namespace fs = std::filesystem;

struct CheckContext {
  std::ostringstream detail;
  bool ok = true;

  void require(bool condition, const std::string& label) {
    if (!condition) {
      ok = false;
      detail << " [FAILED: " << label << "]";
    }
  }
};

Vec scalar(double v) {
  Vec x(1);
  x(0) = v;
  return x;
}

// ---------------------------------------------------------------------------
// 1. Assumption certification through the CLI entry point.
void criterion_assumptions(CheckContext& ctx) {
  const fs::path outdir = fs::temp_directory_path() / "ergo_acceptance_c1";
  fs::remove_all(outdir);
  const ergocli::ExperimentConfig cfg = ergocli::parse_config(
      {"verify-assumptions", "--preset", "example1", "--outdir",
       outdir.string()});
  const int status = ergocli::run(cfg);
  ctx.require(status == 0, "verify-assumptions exit status");
  ctx.detail << "A1(L1=3) A2(L2=3,L3=1) A3i Lemma(0.2,0.1) on [-10,10], 1e4 "
                "samples";
  fs::remove_all(outdir);
}

// ---------------------------------------------------------------------------
// 2. Implicit-step correctness: round trip and uniform monotonicity.
void criterion_implicit_step(CheckContext& ctx) {
  const SodeProblem p = example1_problem();
  double worst_rt = 0.0;
  double worst_mono = 0.0;
  for (double theta : {0.5, 0.75, 1.0}) {
    StmConfig cfg;
    cfg.theta = theta;
    cfg.tau = 0.1;
    StmStepper stepper(p, cfg);
    const rng::Stream s(0, 0, rng::Domain::kGeneric);
    const Vec cold_start = scalar(0.0);
    Vec hat(1), back(1), hx(1), hy(1);
    for (int i = 0; i < 1000; ++i) {
      const Vec x = scalar(20.0 * (s.uniform(i, 0) - 0.5));
      stepper.hat_b(x, hat);
      stepper.implicit_solve(hat, cold_start, back);
      worst_rt = std::max(worst_rt, std::abs(back(0) - x(0)));
    }
    const double lower = 1.0 - p.L1 * theta * cfg.tau / 2.0;
    for (int i = 0; i < 10000; ++i) {
      const Vec x = scalar(20.0 * (s.uniform(i, 1) - 0.5));
      const Vec y = scalar(20.0 * (s.uniform(i, 2) - 0.5));
      stepper.hat_b(x, hx);
      stepper.hat_b(y, hy);
      const double margin =
          (x - y).dot(hx - hy) - lower * (x - y).squaredNorm();
      worst_mono = std::min(worst_mono, margin);
    }
  }
  ctx.require(worst_rt <= 1e-10, "round trip within 1e-10");
  ctx.require(worst_mono >= -1e-8, "monotonicity lower bound");
  ctx.detail << "max round-trip error " << worst_rt << ", worst monotonicity "
             << "slack " << worst_mono;
}

// ---------------------------------------------------------------------------
// 3. One-step drift inequality at fixed states, both Lyapunov regimes.
void criterion_drift_inequality(CheckContext& ctx) {
  const SodeProblem p = example1_problem();
  const int threads = default_thread_count();
  const std::vector<double> xs = {-5.0, -2.0, 0.0, 2.0, 5.0, 15.0};

  LyapunovSpec strong;
  strong.theta = 1.0;
  strong.lambda = 1.0;
  strong.tau = 0.1;
  const DriftConstants dc = drift_constants(p, strong);
  ctx.require(std::abs(dc.rho - 1.0 / 1.1) < 1e-12, "rho = 1/1.1");
  ctx.require(std::abs(dc.kappa - 0.390909) < 1e-6, "kappa = 0.390909");

  for (double x : xs) {
    const DriftVerdict v =
        verify_drift_mc(scalar(x), p, strong, 100000, 0, threads);
    ctx.require(v.passed, "theta=1 drift at x=" + short_num(x));
  }

  LyapunovSpec weak;
  weak.theta = 0.5;
  weak.lambda = 0.0;
  weak.tau = 0.1;
  for (double x : xs) {
    const DriftVerdict v =
        verify_drift_mc(scalar(x), p, weak, 100000, 0, threads);
    ctx.require(v.passed, "theta=1/2 drift at x=" + short_num(x));
  }
  ctx.detail << "12 states x 1e5 paths, bounds rho*V+kappa and "
                "V_half+L2*tau-L3*x^2*tau";
}

// ---------------------------------------------------------------------------
// 4. Geometric decay of E V_theta(X_n) from a far initial state.
void criterion_geometric_decay(CheckContext& ctx) {
  const SodeProblem p = example1_problem();
  LyapunovSpec spec;
  spec.theta = 1.0;
  spec.lambda = 1.0;
  spec.tau = 0.1;
  const auto points = verify_geometric_decay(scalar(15.0), p, spec, 200, 10000,
                                             0, default_thread_count());
  bool all = true;
  for (const auto& pt : points) all = all && pt.passed;
  ctx.require(all, "envelope holds for every n <= 200");

  const DriftConstants dc = drift_constants(p, spec);
  const double tail = dc.kappa / (1.0 - dc.rho);
  const auto& last = points.back();
  ctx.require(last.ev_estimate <= tail + 3.0 * last.std_error,
              "terminal estimate below kappa/(1-rho)");
  ctx.detail << "V(x0)=" << v_theta(scalar(15.0), p, spec)
             << ", terminal EV=" << last.ev_estimate << " vs tail=" << tail;
}

// ---------------------------------------------------------------------------
// 5. Transition density: normalization, law agreement, minorization mass.
void criterion_transition_density(CheckContext& ctx) {
  const SodeProblem p = example1_problem();
  StmConfig cfg;
  cfg.theta = 1.0;
  cfg.tau = 0.1;

  for (double x : {-2.0, 0.0, 2.0}) {
    const double mass = density_normalization(scalar(x), p, cfg);
    ctx.require(std::abs(mass - 1.0) <= 1e-6,
                "normalization at x=" + short_num(x));
  }

  const long n = 100000;
  const std::vector<double> via_density =
      density_inverse_cdf_samples(scalar(0.0), p, cfg, n, 0);
  std::vector<double> via_step(n);
  StmStepper stepper(p, cfg);
  Vec dw(1), next(1);
  for (long i = 0; i < n; ++i) {
    GaussianIncrements inc(0, static_cast<std::uint64_t>(i), cfg.tau);
    inc.fill(0, dw);
    stepper.step(scalar(0.0), dw, next);
    via_step[static_cast<std::size_t>(i)] = next(0);
  }
  const double d = ks_distance(via_density, via_step);
  const double limit = ks_two_sample_threshold(n, n, 0.001);
  ctx.require(d < limit, "KS density-vs-simulation");

  const MinorizationReport probe = minorization_probe(p, cfg, -1.0, 1.0, 201);
  ctx.require(std::abs(probe.small_set_radius - std::sqrt(13.0)) < 1e-12,
              "small set radius sqrt(13)");
  ctx.require(probe.measure_lower_bound > 0.0, "positive minorization mass");
  ctx.detail << "KS=" << d << " (limit " << limit
             << "), nu_mass=" << probe.measure_lower_bound;
}

// ---------------------------------------------------------------------------
// 6. Unique-ergodicity signature across theta and initial data.
void criterion_terminal_law_agreement(CheckContext& ctx) {
  const SodeProblem p = example1_problem();
  std::vector<StmConfig> configs;
  for (double theta : {0.5, 0.75, 1.0}) {
    StmConfig c;
    c.theta = theta;
    c.tau = 0.1;
    configs.push_back(c);
  }
  const ErgodicReport report =
      run_sode_experiment(p, configs, {-5.0, 5.0, 15.0}, 5000, 10000, 0,
                          default_thread_count());
  double worst_same = 0.0, worst_cross = 0.0;
  for (const auto& dist : report.distances) {
    if (dist.cross_theta)
      worst_cross = std::max(worst_cross, dist.ks);
    else
      worst_same = std::max(worst_same, dist.ks);
  }
  ctx.require(worst_same < 0.05, "same-theta KS < 0.05");
  ctx.require(worst_cross < 0.10, "cross-theta KS < 0.10");
  ctx.detail << "worst same-theta KS " << worst_same << ", worst cross-theta "
             << worst_cross << " (9 cells, n=5000, 1e4 paths)";
}

// ---------------------------------------------------------------------------
// 7. Mode-wise closed form of the linear additive implicit step.
void criterion_spde_linear_oracle(CheckContext& ctx) {
  const int n_modes = 10;
  const SpectralSpace space(n_modes);
  const SpdeProblem problem = make_linear_additive(default_q_spectrum(n_modes));
  DiegConfig cfg;
  cfg.tau = 0.1;
  DiegStepper stepper(space, problem, cfg);
  const rng::Stream s(0, 0, rng::Domain::kGeneric);
  SpectralField out(n_modes);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    SpectralField x(n_modes), dw(n_modes);
    for (int k = 0; k < n_modes; ++k) {
      x(k) = 2.0 * s.uniform(trial, 2 * k) - 1.0;
      dw(k) = s.uniform(trial, 2 * k + 1) - 0.5;
    }
    stepper.step(x, dw, out);
    for (int k = 0; k < n_modes; ++k) {
      const double expected =
          (x(k) + dw(k)) / (1.0 + cfg.tau * space.eigenvalues()(k));
      worst = std::max(worst, std::abs(out(k) - expected));
    }
  }
  ctx.require(worst <= 1e-12, "mode-wise closed form within 1e-12");
  ctx.detail << "max deviation " << worst << " over 1e3 random inputs";
}

// ---------------------------------------------------------------------------
// 8. SPDE drift inequality for the Allen-Cahn discretization.
void criterion_spde_drift(CheckContext& ctx) {
  const SpectralSpace space(10);
  const Vec q = default_q_spectrum(10, 2.0);
  const SpdeProblem problem = make_allen_cahn(0.5, -1.0, q);
  const double tau = 0.1, margin = 1.0;

  const DriftConstants dc = drift_constants_spde(problem, space, tau, margin);
  ctx.require(std::abs(dc.rho - 0.336256) < 1e-5, "rho = 0.336256");
  ctx.require(std::abs(dc.kappa - 0.820950) < 1e-4, "kappa = 0.820950");

  for (const auto& field : spde_default_initial_fields(space)) {
    const DriftVerdict v =
        verify_drift_mc_spde(field.coeffs, problem, space, tau, margin, 10000,
                             0, default_thread_count());
    ctx.require(v.passed, "drift at initial field " + field.name);
  }
  ctx.detail << "rho=" << dc.rho << " kappa=" << dc.kappa
             << ", 3 fields x 1e4 paths";
}

// ---------------------------------------------------------------------------
// 9. Time-average convergence of the field experiment.
void criterion_spde_time_averages(CheckContext& ctx) {
  const SpectralSpace space(10);
  const SpdeProblem problem =
      make_allen_cahn(0.5, -1.0, default_q_spectrum(10, 2.0));
  const auto functionals = default_functionals();
  const ErgodicReport report = run_spde_experiment(
      problem, space, 0.1, spde_default_initial_fields(space), 2000, 1000,
      functionals, 0, default_thread_count());

  for (const auto& fn : functionals) {
    std::vector<double> finals;
    for (const auto& curve : report.curves)
      if (curve.functional == fn.name) finals.push_back(curve.values.back());
    for (std::size_t a = 0; a < finals.size(); ++a)
      for (std::size_t b = a + 1; b < finals.size(); ++b) {
        const double rel = std::abs(finals[a] - finals[b]) /
                           std::max(std::abs(finals[a]), std::abs(finals[b]));
        ctx.require(rel <= 0.02, "2% terminal agreement for " + fn.name);
      }
  }

  for (const auto& curve : report.curves) {
    const auto osc = [&curve](std::size_t lo, std::size_t hi) {
      double mn = curve.values[lo], mx = curve.values[lo];
      for (std::size_t i = lo; i < hi; ++i) {
        mn = std::min(mn, curve.values[i]);
        mx = std::max(mx, curve.values[i]);
      }
      return mx - mn;
    };
    const std::size_t len = curve.values.size();
    const double osc_last = osc(3 * len / 4, len);
    ctx.require(osc_last < osc(len / 4, len / 2),
                "oscillation shrinks for " + curve.functional + "/" +
                    curve.initial);
    // Cauchy-type probe: successive doubling gaps shrink, up to the
    // curve's own residual fluctuation scale.
    if (curve.initial == "zero") {
      const double gap_late =
          std::abs(curve.values[len - 1] - curve.values[len / 2 - 1]);
      const double gap_early =
          std::abs(curve.values[len / 2 - 1] - curve.values[len / 4 - 1]);
      ctx.require(gap_late < gap_early + 2.0 * osc_last,
                  "Cauchy probe for " + curve.functional + "/zero");
    }
  }
  ctx.detail << "9 curves, n=2000, 1000 paths";
}

// ---------------------------------------------------------------------------
// 10. Quadrature-exact cubic Nemytskii projection.
void criterion_nemytskii_exactness(CheckContext& ctx) {
  const SpectralSpace space(10);
  SpectralField x = SpectralField::Zero(10);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  x(0) = inv_sqrt2;  // sin(pi xi)
  const SpectralField cubed =
      nemytskii_project(x, [](double u) { return u * u * u; }, space);
  double worst = std::abs(cubed(0) - 0.75 * inv_sqrt2);
  worst = std::max(worst, std::abs(cubed(1)));
  worst = std::max(worst, std::abs(cubed(2) + 0.25 * inv_sqrt2));
  for (int k = 3; k < 10; ++k) worst = std::max(worst, std::abs(cubed(k)));
  ctx.require(worst <= 1e-10, "coefficients (0.75/sqrt2, 0, -0.25/sqrt2)");
  ctx.detail << "max coefficient error " << worst;
}

struct Criterion {
  int id;
  std::string label;
  double time_limit_s;
  std::function<void(CheckContext&)> body;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "assumption certification (example1)", 5.0, criterion_assumptions},
      {2, "implicit-step correctness", 5.0, criterion_implicit_step},
      {3, "one-step drift inequality", 60.0, criterion_drift_inequality},
      {4, "geometric decay envelope", 120.0, criterion_geometric_decay},
      {5, "transition density diagnostics", 60.0,
       criterion_transition_density},
      {6, "terminal-law agreement across cells", 900.0,
       criterion_terminal_law_agreement},
      {7, "spde linear implicit oracle", 1.0, criterion_spde_linear_oracle},
      {8, "spde drift inequality (Allen-Cahn)", 300.0, criterion_spde_drift},
      {9, "spde time-average convergence", 1200.0,
       criterion_spde_time_averages},
      {10, "cubic Nemytskii exactness", 1.0, criterion_nemytskii_exactness},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    CheckContext ctx;
    const auto start = std::chrono::steady_clock::now();
    try {
      criterion.body(ctx);
    } catch (const std::exception& e) {
      ctx.ok = false;
      ctx.detail << " [EXCEPTION: " << e.what() << "]";
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (elapsed >= criterion.time_limit_s) {
      ctx.ok = false;
      ctx.detail << " [runtime limit " << criterion.time_limit_s
                 << "s exceeded]";
    }
    if (!ctx.ok) ++failures;
    std::printf("[%s] criterion %2d: %s — %s (%.2fs < %.0fs)\n",
                ctx.ok ? "PASS" : "FAIL", criterion.id,
                criterion.label.c_str(), ctx.detail.str().c_str(), elapsed,
                criterion.time_limit_s);
    std::fflush(stdout);
  }
  if (failures == 0) {
    std::printf("all %zu acceptance criteria passed\n", criteria.size());
  } else {
    std::printf("%d acceptance criteria FAILED\n", failures);
  }
  return failures;
}
