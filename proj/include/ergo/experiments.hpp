#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ergo/lyapunov.hpp"
#include "ergo/spde_scheme.hpp"
#include "ergo/stats.hpp"
#include "ergo/theta_scheme.hpp"

namespace ergo {

/// Where the empirical one-step law is sampled from: terminal states across
/// independent paths (matches the law of X_n), or states along each path
/// after burn-in.
enum class DensityMode { kTerminal, kAlongPath };

/// Aggregated output of a multi-initial-condition experiment. Cells,
/// distances and curves are stored in a fixed order so serialization is
/// reproducible byte for byte.
struct ErgodicReport {
  struct SodeCell {
    double theta = 0.0;
    double x0 = 0.0;
    std::string name;  // "theta<t>_x0<v>"
    std::vector<double> samples;
    std::optional<KdeCurve> kde;
  };
  struct PairDistance {
    std::string cell_a, cell_b;
    double ks = 0.0;
    bool cross_theta = false;
  };
  struct Curve {
    std::string functional;
    std::string initial;
    long start_n = 1;  // n of the first entry
    std::vector<double> values;
  };
  struct DriftRecord {
    std::string id;
    double x = 0.0;  // probe state (first coordinate / label value)
    double v = 0.0;  // Lyapunov value at the probe state
    DriftVerdict verdict;
  };

  std::vector<SodeCell> sode_cells;
  std::vector<PairDistance> distances;
  std::vector<Curve> curves;
  std::vector<DriftRecord> drift_verdicts;
  std::vector<std::string> warnings;

  /// Writes kde_<theta>_<x0>.csv, distances.csv, timeavg_<phi>_<ic>.csv,
  /// drift.csv into outdir (created if needed).
  void write_csvs(const std::string& outdir) const;
};

/// Simulates `paths` independent trajectories to step n for every
/// (config, x0) cell, collects density samples, estimates each cell's
/// density, and computes all pairwise KS distances. Noise streams are keyed
/// by (seed, cell, path, step), so cells are mutually independent and the
/// pairwise distances compare independent draws. d = 1 problems only.
ErgodicReport run_sode_experiment(const SodeProblem& problem,
                                  const std::vector<StmConfig>& configs,
                                  const std::vector<double>& initial_data,
                                  long n, long paths, std::uint64_t seed,
                                  int threads = 1,
                                  DensityMode mode = DensityMode::kTerminal,
                                  long burn_in = 0);

struct NamedField {
  std::string name;
  SpectralField coeffs;
};

/// 0, sin(pi xi), sum_{k=1..N} sin(k pi xi).
std::vector<NamedField> spde_default_initial_fields(const SpectralSpace& space);

/// Time-average curves A(n) for each (initial field, functional) pair,
/// averaged over `paths` independent realizations; burn-in 0 (the raw
/// running mean starting at step 1).
ErgodicReport run_spde_experiment(const SpdeProblem& problem,
                                  const SpectralSpace& space, double tau,
                                  const std::vector<NamedField>& initial_fields,
                                  long n, long paths,
                                  const std::vector<TestFunctional>& functionals,
                                  std::uint64_t seed, int threads = 1);

/// Minimal decimal form used in cell names and file names ("0.5", "-5").
std::string short_num(double v);

}  // namespace ergo
