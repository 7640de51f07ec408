#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "cli_config.hpp"
#include "ergo/assumption_checks.hpp"
#include "ergo/csv.hpp"
#include "ergo/errors.hpp"
#include "ergo/experiments.hpp"
#include "ergo/lyapunov.hpp"
#include "ergo/parallel.hpp"
#include "ergo/spde_scheme.hpp"
#include "ergo/transition_density.hpp"

namespace ergocli {

namespace {

namespace fs = std::filesystem;
using namespace ergo;

struct SummaryRow {
  std::string check_id;
  bool passed = false;
  std::string detail;
};

class Summary {
 public:
  void add(std::string check_id, bool passed, std::string detail) {
    rows_.push_back({std::move(check_id), passed, std::move(detail)});
  }
  void note(std::string check_id, std::string detail) {
    rows_.push_back({std::move(check_id), true, std::move(detail)});
  }
  bool all_passed() const {
    return std::all_of(rows_.begin(), rows_.end(),
                       [](const SummaryRow& r) { return r.passed; });
  }
  void write(const fs::path& outdir) const {
    std::ofstream os(outdir / "summary.csv");
    os << "check_id,passed,detail\n";
    for (const auto& r : rows_)
      os << r.check_id << "," << (r.passed ? "true" : "false") << ","
         << r.detail << "\n";
  }

 private:
  std::vector<SummaryRow> rows_;
};

SodeProblem resolve_problem(const ExperimentConfig& cfg) {
  SodeProblem p = problem_preset(cfg.preset);
  if (!std::isnan(cfg.L1_override)) p.L1 = cfg.L1_override;
  if (!std::isnan(cfg.L2_override)) p.L2 = cfg.L2_override;
  if (!std::isnan(cfg.L3_override)) p.L3 = cfg.L3_override;
  return p;
}

int resolve_threads(const ExperimentConfig& cfg) {
  return cfg.threads > 0 ? cfg.threads : default_thread_count();
}

void check_solvability(const SodeProblem& p, double theta, double tau) {
  if (theta > 0.0 && !(p.L1 * theta * tau < 2.0))
    throw UsageError("L1*theta*tau < 2 violated (L1=" + csv::fmt(p.L1) +
                     ", theta=" + csv::fmt(theta) + ", tau=" + csv::fmt(tau) +
                     ")");
}

LyapunovSpec resolve_spec(const ExperimentConfig& cfg, double theta) {
  LyapunovSpec spec = LyapunovSpec::with_default_lambda(theta, cfg.tau);
  if (cfg.lambda_given) spec.lambda = cfg.lambda;
  spec.validate();
  return spec;
}

void run_verify_assumptions(const ExperimentConfig& cfg, const fs::path& outdir,
                            Summary& summary) {
  const SodeProblem p = resolve_problem(cfg);
  SampleSpec box = SampleSpec::cube(p.d, cfg.box_lo, cfg.box_hi, cfg.samples,
                                    cfg.seed);
  const int threads = resolve_threads(cfg);

  std::vector<AssumptionReport> reports;
  reports.push_back(check_monotonicity(p, box, cfg.tolerance, threads));
  reports.push_back(check_coercivity(p, box, cfg.tolerance, threads));
  reports.push_back(check_nondegeneracy(p, box, cfg.tolerance, threads));
  reports.push_back(
      check_lemma_inequality(p, cfg.rho, cfg.beta, box, cfg.tolerance, threads));

  std::ofstream os(outdir / "assumptions.csv");
  os << "assumption_id,passed,worst_margin,samples_used\n";
  for (const auto& r : reports) {
    os << r.csv_row() << "\n";
    summary.add(to_string(r.id), r.passed,
                "worst_margin=" + csv::fmt(r.worst_margin));
  }
}

void run_sode_density(const ExperimentConfig& cfg, const fs::path& outdir,
                      Summary& summary) {
  const SodeProblem p = resolve_problem(cfg);
  std::vector<StmConfig> configs;
  for (double theta : cfg.thetas) {
    check_solvability(p, theta, cfg.tau);
    StmConfig sc;
    sc.theta = theta;
    sc.tau = cfg.tau;
    configs.push_back(sc);
  }
  const DensityMode mode = cfg.density_mode == "terminal"
                               ? DensityMode::kTerminal
                               : DensityMode::kAlongPath;
  const ErgodicReport report =
      run_sode_experiment(p, configs, cfg.x0, cfg.n, cfg.paths, cfg.seed,
                          resolve_threads(cfg), mode, cfg.burn_in);
  report.write_csvs(outdir.string());
  for (const auto& warning : report.warnings) summary.note("warning", warning);
  for (const auto& dist : report.distances) {
    const double limit =
        dist.cross_theta ? cfg.ks_cross_theta_max : cfg.ks_same_theta_max;
    summary.add("ks_" + dist.cell_a + "_vs_" + dist.cell_b, dist.ks < limit,
                "ks=" + csv::fmt(dist.ks) + " limit=" + csv::fmt(limit));
  }
}

void run_sode_drift(const ExperimentConfig& cfg, const fs::path& outdir,
                    Summary& summary) {
  const SodeProblem p = resolve_problem(cfg);
  const double theta = cfg.thetas.empty() ? 1.0 : cfg.thetas.front();
  check_solvability(p, theta, cfg.tau);
  const LyapunovSpec spec = resolve_spec(cfg, theta);

  ErgodicReport report;
  for (double x0 : cfg.x0) {
    Vec x(1);
    x(0) = x0;
    ErgodicReport::DriftRecord record;
    record.id = "drift_x" + short_num(x0);
    record.x = x0;
    record.v = spec.theta == 0.5 ? v_half(x, p, spec.tau)
                                 : v_theta(x, p, spec);
    record.verdict = verify_drift_mc(x, p, spec, cfg.mc_paths, cfg.seed,
                                     resolve_threads(cfg));
    summary.add(record.id, record.verdict.passed,
                "lhs=" + csv::fmt(record.verdict.lhs_estimate) +
                    " bound=" + csv::fmt(record.verdict.bound));
    report.drift_verdicts.push_back(std::move(record));
  }
  report.write_csvs(outdir.string());
}

void run_sode_decay(const ExperimentConfig& cfg, const fs::path& outdir,
                    Summary& summary) {
  const SodeProblem p = resolve_problem(cfg);
  const double theta = cfg.thetas.empty() ? 1.0 : cfg.thetas.front();
  if (!(theta > 0.5))
    throw UsageError(
        "key 'theta' must exceed 1/2 for the geometric decay envelope");
  check_solvability(p, theta, cfg.tau);
  const LyapunovSpec spec = resolve_spec(cfg, theta);
  Vec x0(1);
  x0(0) = cfg.x0.empty() ? 15.0 : cfg.x0.front();

  const auto points = verify_geometric_decay(x0, p, spec, cfg.n, cfg.mc_paths,
                                             cfg.seed, resolve_threads(cfg));
  std::ofstream os(outdir / "decay.csv");
  os << "n,EV_estimate,std_error,bound,passed\n";
  bool all = true;
  for (const auto& pt : points) {
    os << pt.n << "," << csv::fmt(pt.ev_estimate) << ","
       << csv::fmt(pt.std_error) << "," << csv::fmt(pt.bound) << ","
       << (pt.passed ? "true" : "false") << "\n";
    all = all && pt.passed;
  }
  summary.add("decay_all_steps", all,
              "n=" + std::to_string(cfg.n) +
                  " paths=" + std::to_string(cfg.mc_paths));
  const DriftConstants dc = drift_constants(p, spec);
  const auto& last = points.back();
  const double tail = dc.kappa / (1.0 - dc.rho);
  summary.add("decay_terminal_below_tail",
              last.ev_estimate <= tail + 3.0 * last.std_error,
              "EV=" + csv::fmt(last.ev_estimate) + " tail=" + csv::fmt(tail));
}

void run_sode_minorization(const ExperimentConfig& cfg, const fs::path& outdir,
                           Summary& summary) {
  const SodeProblem p = resolve_problem(cfg);
  const double theta = cfg.thetas.empty() ? 1.0 : cfg.thetas.front();
  check_solvability(p, theta, cfg.tau);
  StmConfig sc;
  sc.theta = theta;
  sc.tau = cfg.tau;

  for (double x0 : cfg.x0) {
    Vec x(1);
    x(0) = x0;
    const double mass = density_normalization(x, p, sc);
    summary.add("density_normalization_x" + short_num(x0),
                std::abs(mass - 1.0) <= 1e-6, "integral=" + csv::fmt(mass));
  }

  const MinorizationReport report =
      minorization_probe(p, sc, cfg.probe_lo, cfg.probe_hi, cfg.grid);
  std::ofstream os(outdir / "minorization.csv");
  os << "small_set_radius,measure_lower_bound,probe_set,grid_resolution\n";
  os << csv::fmt(report.small_set_radius) << ","
     << csv::fmt(report.measure_lower_bound) << "," << report.probe_set << ","
     << report.grid_resolution << "\n";
  summary.add("minorization_lower_bound", report.passed,
              "nu_mass=" + csv::fmt(report.measure_lower_bound));
}

SpdeProblem resolve_spde_problem(const ExperimentConfig& cfg,
                                 const SpectralSpace& space) {
  if (cfg.preset != "allen-cahn")
    throw UsageError("key 'preset' must be 'allen-cahn' for spde commands");
  const Vec q = default_q_spectrum(cfg.n_modes, cfg.q_exponent);
  const SpdeProblem problem = make_allen_cahn(cfg.epsilon, cfg.K2, q);
  if (!((problem.K1 - space.lambda1()) * cfg.tau < 1.0))
    throw UsageError("(K1 - lambda_1) tau < 1 violated (epsilon=" +
                     csv::fmt(cfg.epsilon) + ", tau=" + csv::fmt(cfg.tau) + ")");
  return problem;
}

void run_spde_timeavg(const ExperimentConfig& cfg, const fs::path& outdir,
                      Summary& summary) {
  const SpectralSpace space(cfg.n_modes);
  const SpdeProblem problem = resolve_spde_problem(cfg, space);

  const auto fields = spde_default_initial_fields(space);
  for (const auto& field : fields) {
    std::ofstream coeff_os(outdir / ("field_" + field.name + "_coeffs.csv"));
    write_field_coeff_csv(coeff_os, field.coeffs);
    std::ofstream value_os(outdir / ("field_" + field.name + "_values.csv"));
    write_field_value_csv(value_os, space, field.coeffs);
  }
  const auto functionals = default_functionals();
  const ErgodicReport report =
      run_spde_experiment(problem, space, cfg.tau, fields, cfg.n, cfg.paths,
                          functionals, cfg.seed, resolve_threads(cfg));
  report.write_csvs(outdir.string());

  // Terminal agreement across initial data, per functional.
  for (const auto& fn : functionals) {
    std::vector<double> finals;
    for (const auto& curve : report.curves)
      if (curve.functional == fn.name) finals.push_back(curve.values.back());
    double worst = 0.0;
    for (std::size_t a = 0; a < finals.size(); ++a)
      for (std::size_t b = a + 1; b < finals.size(); ++b) {
        const double scale =
            std::max(std::abs(finals[a]), std::abs(finals[b]));
        if (scale > 0.0)
          worst = std::max(worst, std::abs(finals[a] - finals[b]) / scale);
      }
    summary.add("timeavg_agreement_" + fn.name, worst <= cfg.rel_agreement_max,
                "max_rel_diff=" + csv::fmt(worst));
  }

  // Oscillation of each running average should shrink along the run.
  for (const auto& curve : report.curves) {
    const auto window_osc = [&curve](std::size_t lo, std::size_t hi) {
      double mn = curve.values[lo], mx = curve.values[lo];
      for (std::size_t i = lo; i < hi; ++i) {
        mn = std::min(mn, curve.values[i]);
        mx = std::max(mx, curve.values[i]);
      }
      return mx - mn;
    };
    const std::size_t len = curve.values.size();
    const double second = window_osc(len / 4, len / 2);
    const double last = window_osc(3 * len / 4, len);
    summary.add("timeavg_settles_" + curve.functional + "_" + curve.initial,
                last < second,
                "last_osc=" + csv::fmt(last) + " second_osc=" + csv::fmt(second));
  }
}

void run_spde_drift(const ExperimentConfig& cfg, const fs::path& outdir,
                    Summary& summary) {
  const SpectralSpace space(cfg.n_modes);
  const SpdeProblem problem = resolve_spde_problem(cfg, space);

  const DriftConstants dc =
      drift_constants_spde(problem, space, cfg.tau, cfg.eps_margin);
  summary.note("drift_constants",
               "rho=" + csv::fmt(dc.rho) + " kappa=" + csv::fmt(dc.kappa));

  std::ofstream os(outdir / "spde_drift.csv");
  os << "initial,V,lhs_estimate,std_error,bound,passed\n";
  for (const auto& field : spde_default_initial_fields(space)) {
    const DriftVerdict verdict = verify_drift_mc_spde(
        field.coeffs, problem, space, cfg.tau, cfg.eps_margin, cfg.mc_paths,
        cfg.seed, resolve_threads(cfg));
    const double v =
        lyapunov_spde(field.coeffs, problem, space, cfg.tau, cfg.eps_margin);
    os << field.name << "," << csv::fmt(v) << ","
       << csv::fmt(verdict.lhs_estimate) << "," << csv::fmt(verdict.std_error)
       << "," << csv::fmt(verdict.bound) << ","
       << (verdict.passed ? "true" : "false") << "\n";
    summary.add("spde_drift_" + field.name, verdict.passed,
                "lhs=" + csv::fmt(verdict.lhs_estimate) +
                    " bound=" + csv::fmt(verdict.bound));
  }
}

}  // namespace

int run(const ExperimentConfig& cfg) {
  const fs::path outdir(cfg.outdir);
  fs::create_directories(outdir);
  {
    std::ofstream os(outdir / "resolved_config");
    os << cfg.to_json().dump(2) << "\n";
  }

  Summary summary;
  try {
    if (cfg.command == "verify-assumptions")
      run_verify_assumptions(cfg, outdir, summary);
    else if (cfg.command == "sode-density")
      run_sode_density(cfg, outdir, summary);
    else if (cfg.command == "sode-drift")
      run_sode_drift(cfg, outdir, summary);
    else if (cfg.command == "sode-decay")
      run_sode_decay(cfg, outdir, summary);
    else if (cfg.command == "sode-minorization")
      run_sode_minorization(cfg, outdir, summary);
    else if (cfg.command == "spde-timeavg")
      run_spde_timeavg(cfg, outdir, summary);
    else if (cfg.command == "spde-drift")
      run_spde_drift(cfg, outdir, summary);
    else
      throw UsageError("unknown command: " + cfg.command);
  } catch (const SolverError& e) {
    summary.add("solver", false, e.what());
    summary.write(outdir);
    std::cerr << "solver failure: " << e.what() << "\n";
    return 1;
  }

  summary.write(outdir);
  return summary.all_passed() ? 0 : 1;
}

}  // namespace ergocli
