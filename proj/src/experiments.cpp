#include "ergo/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ergo/csv.hpp"
#include "ergo/errors.hpp"
#include "ergo/parallel.hpp"

namespace ergo {

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

namespace {

void write_lines(const std::filesystem::path& path, const std::string& header,
                 const std::vector<std::string>& rows) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  os << header << "\n";
  for (const auto& row : rows) os << row << "\n";
}

}  // namespace

void ErgodicReport::write_csvs(const std::string& outdir) const {
  namespace fs = std::filesystem;
  fs::create_directories(outdir);
  for (const auto& cell : sode_cells) {
    if (!cell.kde) continue;
    std::vector<std::string> rows;
    rows.reserve(cell.kde->x.size());
    for (std::size_t i = 0; i < cell.kde->x.size(); ++i)
      rows.push_back(csv::fmt(cell.kde->x[i]) + "," +
                     csv::fmt(cell.kde->density[i]));
    write_lines(fs::path(outdir) / ("kde_" + short_num(cell.theta) + "_" +
                                    short_num(cell.x0) + ".csv"),
                "x,density", rows);
  }
  if (!distances.empty()) {
    std::vector<std::string> rows;
    rows.reserve(distances.size());
    for (const auto& dist : distances)
      rows.push_back(dist.cell_a + "," + dist.cell_b + "," + csv::fmt(dist.ks));
    write_lines(fs::path(outdir) / "distances.csv", "cell_a,cell_b,ks", rows);
  }
  for (const auto& curve : curves) {
    std::vector<std::string> rows;
    rows.reserve(curve.values.size());
    for (std::size_t i = 0; i < curve.values.size(); ++i)
      rows.push_back(std::to_string(curve.start_n + static_cast<long>(i)) +
                     "," + csv::fmt(curve.values[i]));
    write_lines(fs::path(outdir) /
                    ("timeavg_" + curve.functional + "_" + curve.initial +
                     ".csv"),
                "n,A", rows);
  }
  if (!drift_verdicts.empty()) {
    std::vector<std::string> rows;
    rows.reserve(drift_verdicts.size());
    for (const auto& record : drift_verdicts)
      rows.push_back(drift_verdict_csv_row(record.x, record.v, record.verdict));
    write_lines(fs::path(outdir) / "drift.csv",
                "x,V,lhs_estimate,std_error,bound,passed", rows);
  }
}

ErgodicReport run_sode_experiment(const SodeProblem& problem,
                                  const std::vector<StmConfig>& configs,
                                  const std::vector<double>& initial_data,
                                  long n, long paths, std::uint64_t seed,
                                  int threads, DensityMode mode,
                                  long burn_in) {
  problem.validate();
  if (problem.d != 1)
    throw PreconditionError("run_sode_experiment supports d = 1 only");
  if (n < 1 || paths < 1)
    throw PreconditionError("run_sode_experiment: n and paths must be >= 1");
  if (burn_in < 0 || burn_in >= n)
    throw PreconditionError("run_sode_experiment: burn_in must be < n");
  for (const auto& config : configs) {
    config.validate();
    if (config.theta > 0.0 && !(problem.L1 * config.theta * config.tau < 2.0))
      throw PreconditionError(
          "run_sode_experiment: L1*theta*tau < 2 violated for theta=" +
          short_num(config.theta));
  }

  // Along-path sampling thins time so a cell never stores more than ~2e5
  // samples.
  const long span = n - burn_in;
  const long stride =
      mode == DensityMode::kAlongPath
          ? std::max<long>(1, (span * paths + 200000 - 1) / 200000)
          : 1;
  const long per_path =
      mode == DensityMode::kAlongPath ? (span + stride - 1) / stride : 1;

  ErgodicReport report;
  std::uint64_t cell_index = 0;
  for (const auto& config : configs) {
    for (double x0 : initial_data) {
      ErgodicReport::SodeCell cell;
      cell.theta = config.theta;
      cell.x0 = x0;
      cell.name = "theta" + short_num(config.theta) + "_x0" + short_num(x0);
      cell.samples.assign(static_cast<std::size_t>(paths * per_path), 0.0);
      // Disjoint substream band per cell: every cell simulates genuinely
      // independent noise, so pairwise distances compare independent draws.
      const std::uint64_t stream_base = cell_index++ << 40;

      parallel_blocks(
          paths, kDefaultBlockSize, threads,
          [&](std::int64_t lo, std::int64_t hi, std::int64_t) {
            StmStepper stepper(problem, config);
            Vec state(1), next(1), dw(1);
            for (std::int64_t path = lo; path < hi; ++path) {
              GaussianIncrements increments(
                  seed, stream_base + static_cast<std::uint64_t>(path),
                  config.tau);
              state(0) = x0;
              long written = 0;
              for (long k = 1; k <= n; ++k) {
                increments.fill(k - 1, dw);
                try {
                  stepper.step(state, dw, next);
                } catch (const SolverError& e) {
                  throw SolverError(std::string(e.what()) + " in cell " +
                                        cell.name,
                                    e.residual(), k - 1);
                }
                state = next;
                if (mode == DensityMode::kAlongPath && k > burn_in &&
                    (k - burn_in - 1) % stride == 0) {
                  cell.samples[static_cast<std::size_t>(path * per_path +
                                                        written)] = state(0);
                  ++written;
                }
              }
              if (mode == DensityMode::kTerminal)
                cell.samples[static_cast<std::size_t>(path)] = state(0);
            }
          });

      if (cell.samples.size() >= 100) {
        cell.kde = empirical_density(cell.samples);
      } else {
        report.warnings.push_back("kde skipped for " + cell.name +
                                  ": fewer than 100 samples");
      }
      report.sode_cells.push_back(std::move(cell));
    }
  }

  for (std::size_t a = 0; a < report.sode_cells.size(); ++a) {
    for (std::size_t b = a + 1; b < report.sode_cells.size(); ++b) {
      ErgodicReport::PairDistance dist;
      dist.cell_a = report.sode_cells[a].name;
      dist.cell_b = report.sode_cells[b].name;
      dist.ks = ks_distance(report.sode_cells[a].samples,
                            report.sode_cells[b].samples);
      dist.cross_theta =
          report.sode_cells[a].theta != report.sode_cells[b].theta;
      report.distances.push_back(std::move(dist));
    }
  }
  return report;
}

std::vector<NamedField> spde_default_initial_fields(
    const SpectralSpace& space) {
  std::vector<NamedField> fields;
  fields.push_back({"zero", SpectralField::Zero(space.modes())});
  fields.push_back({"sinpix", sine_sum_field(space, 1)});
  fields.push_back({"sumsin" + std::to_string(space.modes()),
                    sine_sum_field(space, space.modes())});
  return fields;
}

ErgodicReport run_spde_experiment(const SpdeProblem& problem,
                                  const SpectralSpace& space, double tau,
                                  const std::vector<NamedField>& initial_fields,
                                  long n, long paths,
                                  const std::vector<TestFunctional>& functionals,
                                  std::uint64_t seed, int threads) {
  if (n < 1 || paths < 1)
    throw PreconditionError("run_spde_experiment: n and paths must be >= 1");
  DiegConfig config;
  config.tau = tau;

  ErgodicReport report;
  const std::size_t n_fun = functionals.size();
  const std::int64_t n_blocks =
      (paths + kDefaultBlockSize - 1) / kDefaultBlockSize;

  std::uint64_t field_index = 0;
  for (const auto& field : initial_fields) {
    const std::uint64_t stream_base = field_index++ << 40;
    // partial[block] holds, per functional, the sum over the block's paths
    // of phi(X_k) for k = 1..n.
    std::vector<std::vector<std::vector<double>>> partial(
        static_cast<std::size_t>(n_blocks),
        std::vector<std::vector<double>>(
            n_fun, std::vector<double>(static_cast<std::size_t>(n), 0.0)));

    parallel_blocks(
        paths, kDefaultBlockSize, threads,
        [&](std::int64_t lo, std::int64_t hi, std::int64_t blk) {
          DiegStepper stepper(space, problem, config);
          SpectralField state(space.modes()), next(space.modes());
          auto& acc = partial[static_cast<std::size_t>(blk)];
          for (std::int64_t path = lo; path < hi; ++path) {
            const rng::Stream stream(
                seed, stream_base + static_cast<std::uint64_t>(path),
                rng::Domain::kPathNoise);
            state = field.coeffs;
            for (long k = 1; k <= n; ++k) {
              const SpectralField dw = qwiener_increment(
                  space, problem.q_spectrum, tau, stream,
                  static_cast<std::uint64_t>(k - 1));
              try {
                stepper.step(state, dw, next);
              } catch (const SolverError& e) {
                throw SolverError(std::string(e.what()) + " in field " +
                                      field.name,
                                  e.residual(), k - 1);
              }
              state = next;
              for (std::size_t j = 0; j < n_fun; ++j)
                acc[j][static_cast<std::size_t>(k - 1)] +=
                    functionals[j].phi(state);
            }
          }
        });

    for (std::size_t j = 0; j < n_fun; ++j) {
      std::vector<double> step_means(static_cast<std::size_t>(n), 0.0);
      for (std::int64_t blk = 0; blk < n_blocks; ++blk)
        for (long k = 0; k < n; ++k)
          step_means[static_cast<std::size_t>(k)] +=
              partial[static_cast<std::size_t>(blk)][j]
                     [static_cast<std::size_t>(k)];
      for (auto& m : step_means) m /= static_cast<double>(paths);

      ErgodicReport::Curve curve;
      curve.functional = functionals[j].name;
      curve.initial = field.name;
      curve.start_n = 1;
      curve.values = running_time_average(step_means, 0);
      report.curves.push_back(std::move(curve));
    }
  }
  return report;
}

}  // namespace ergo
