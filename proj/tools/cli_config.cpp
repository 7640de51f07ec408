#include "cli_config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include <CLI11.hpp>

namespace ergocli {

namespace {

using nlohmann::ordered_json;

const std::set<std::string> kKnownKeys = {
    "command",      "preset",       "theta",        "lambda",
    "tau",          "N",            "epsilon",      "eps_margin",
    "K2",           "q_spectrum_exponent", "n",     "paths",
    "mc_paths",     "seed",         "burn_in",      "box",
    "probe",        "grid",         "samples",      "tolerance",
    "rho",          "beta",         "x0",           "density_mode",
    "unsafe",       "ks_same_theta_max", "ks_cross_theta_max",
    "rel_agreement_max", "L1",      "L2",           "L3",
    "outdir",       "threads"};

ordered_json command_defaults(const std::string& command) {
  ordered_json d;
  d["command"] = command;
  d["preset"] = "example1";
  d["tau"] = 0.1;
  d["seed"] = 0;
  d["threads"] = 0;
  d["outdir"] = "out";
  d["tolerance"] = 1e-10;
  d["unsafe"] = false;

  if (command == "verify-assumptions") {
    d["box"] = {-10.0, 10.0};
    d["samples"] = 10000;
    d["rho"] = 0.2;
    d["beta"] = 0.1;
  } else if (command == "sode-density") {
    d["theta"] = {0.5, 0.75, 1.0};
    d["x0"] = {-5.0, 5.0, 15.0};
    d["n"] = 5000;
    d["paths"] = 10000;
    d["burn_in"] = 0;
    d["density_mode"] = "terminal";
    d["ks_same_theta_max"] = 0.05;
    d["ks_cross_theta_max"] = 0.10;
  } else if (command == "sode-drift") {
    d["theta"] = {1.0};
    d["x0"] = {-5.0, -2.0, 0.0, 2.0, 5.0, 15.0};
    d["mc_paths"] = 100000;
  } else if (command == "sode-decay") {
    d["theta"] = {1.0};
    d["x0"] = {15.0};
    d["n"] = 200;
    d["mc_paths"] = 10000;
  } else if (command == "sode-minorization") {
    d["theta"] = {1.0};
    d["x0"] = {-2.0, 0.0, 2.0};
    d["probe"] = {-1.0, 1.0};
    d["grid"] = 201;
  } else if (command == "spde-timeavg") {
    d["preset"] = "allen-cahn";
    d["epsilon"] = 0.5;
    d["K2"] = -1.0;
    d["eps_margin"] = 1.0;
    d["N"] = 10;
    d["q_spectrum_exponent"] = 2.0;
    d["n"] = 2000;
    d["paths"] = 1000;
    d["burn_in"] = 0;
    d["rel_agreement_max"] = 0.02;
  } else if (command == "spde-drift") {
    d["preset"] = "allen-cahn";
    d["epsilon"] = 0.5;
    d["K2"] = -1.0;
    d["eps_margin"] = 1.0;
    d["N"] = 10;
    d["q_spectrum_exponent"] = 2.0;
    d["mc_paths"] = 10000;
  } else {
    throw UsageError("unknown command: " + command);
  }
  return d;
}

void require_known_keys(const ordered_json& obj, const std::string& source) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!kKnownKeys.contains(key))
      throw UsageError("unknown key '" + key + "' in " + source);
  }
}

double as_double(const ordered_json& j, const std::string& key) {
  if (!j.is_number())
    throw UsageError("key '" + key + "' must be a number");
  return j.get<double>();
}

long as_long(const ordered_json& j, const std::string& key) {
  if (!j.is_number_integer())
    throw UsageError("key '" + key + "' must be an integer");
  return j.get<long>();
}

std::vector<double> as_double_list(const ordered_json& j,
                                   const std::string& key) {
  std::vector<double> out;
  if (j.is_number()) {
    out.push_back(j.get<double>());
    return out;
  }
  if (!j.is_array()) throw UsageError("key '" + key + "' must be a list");
  for (const auto& v : j) out.push_back(as_double(v, key));
  return out;
}

}  // namespace

const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> commands = {
      "verify-assumptions", "sode-density", "sode-drift",     "sode-decay",
      "sode-minorization",  "spde-timeavg", "spde-drift"};
  return commands;
}

ordered_json ExperimentConfig::to_json() const {
  ordered_json j;
  j["command"] = command;
  j["preset"] = preset;
  if (!thetas.empty()) j["theta"] = thetas;
  if (lambda_given) j["lambda"] = lambda;
  j["tau"] = tau;
  if (command.rfind("spde", 0) == 0) {
    j["N"] = n_modes;
    j["epsilon"] = epsilon;
    j["eps_margin"] = eps_margin;
    j["K2"] = K2;
    j["q_spectrum_exponent"] = q_exponent;
  }
  if (n > 0) j["n"] = n;
  if (paths > 0) j["paths"] = paths;
  if (mc_paths > 0) j["mc_paths"] = mc_paths;
  j["seed"] = seed;
  if (command == "sode-density") {
    j["burn_in"] = burn_in;
    j["density_mode"] = density_mode;
    j["ks_same_theta_max"] = ks_same_theta_max;
    j["ks_cross_theta_max"] = ks_cross_theta_max;
  }
  if (command == "verify-assumptions") {
    j["box"] = {box_lo, box_hi};
    j["samples"] = samples;
    j["rho"] = rho;
    j["beta"] = beta;
  }
  if (command == "sode-minorization") {
    j["probe"] = {probe_lo, probe_hi};
    j["grid"] = grid;
  }
  if (command == "spde-timeavg") j["rel_agreement_max"] = rel_agreement_max;
  if (!x0.empty() && command.rfind("sode", 0) == 0) j["x0"] = x0;
  j["tolerance"] = tolerance;
  j["unsafe"] = unsafe;
  if (!std::isnan(L1_override)) j["L1"] = L1_override;
  if (!std::isnan(L2_override)) j["L2"] = L2_override;
  if (!std::isnan(L3_override)) j["L3"] = L3_override;
  j["outdir"] = outdir;
  j["threads"] = threads;
  return j;
}

ExperimentConfig parse_config(const std::vector<std::string>& args) {
  CLI::App app{"ergodicity toolkit"};

  std::string command_arg, config_path;
  app.add_option("command", command_arg,
                 "one of: verify-assumptions sode-density sode-drift "
                 "sode-decay sode-minorization spde-timeavg spde-drift");
  app.add_option("--config", config_path, "JSON config file");

  std::string preset, outdir, density_mode;
  std::vector<double> thetas, x0, box, probe;
  double lambda = 0, tau = 0, epsilon = 0, eps_margin = 0, K2 = 0,
         q_exponent = 0, tolerance = 0, rho = 0, beta = 0,
         ks_same = 0, ks_cross = 0, rel_agree = 0, L1 = 0, L2 = 0, L3 = 0;
  long n = 0, paths = 0, mc_paths = 0, burn_in = 0, samples = 0;
  int n_modes = 0, grid = 0, threads = 0;
  std::uint64_t seed = 0;
  bool unsafe = false;

  app.add_option("--preset", preset);
  app.add_option("--theta", thetas)->expected(-1);
  app.add_option("--lambda", lambda);
  app.add_option("--tau", tau);
  app.add_option("--N", n_modes);
  app.add_option("--epsilon", epsilon);
  app.add_option("--eps-margin", eps_margin);
  app.add_option("--K2", K2);
  app.add_option("--q-spectrum-exponent", q_exponent);
  app.add_option("--n", n);
  app.add_option("--paths", paths);
  app.add_option("--mc-paths", mc_paths);
  app.add_option("--seed", seed);
  app.add_option("--burn-in", burn_in);
  app.add_option("--box", box)->expected(2);
  app.add_option("--probe", probe)->expected(2);
  app.add_option("--grid", grid);
  app.add_option("--samples", samples);
  app.add_option("--tolerance", tolerance);
  app.add_option("--rho", rho);
  app.add_option("--beta", beta);
  app.add_option("--x0", x0)->expected(-1);
  app.add_option("--density-mode", density_mode);
  app.add_flag("--unsafe", unsafe);
  app.add_option("--ks-same-theta-max", ks_same);
  app.add_option("--ks-cross-theta-max", ks_cross);
  app.add_option("--rel-agreement-max", rel_agree);
  app.add_option("--L1", L1);
  app.add_option("--L2", L2);
  app.add_option("--L3", L3);
  app.add_option("--outdir", outdir);
  app.add_option("--threads", threads);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  ordered_json file;
  if (!config_path.empty()) {
    std::ifstream is(config_path);
    if (!is) throw UsageError("cannot open config file: " + config_path);
    try {
      file = ordered_json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
      throw UsageError("config file is not valid JSON: " +
                       std::string(e.what()));
    }
    if (!file.is_object()) throw UsageError("config file must be an object");
    require_known_keys(file, config_path);
  }

  std::string command = command_arg;
  if (command.empty() && file.contains("command"))
    command = file["command"].get<std::string>();
  if (command.empty())
    throw UsageError("no command given (positional argument or 'command' key)");

  ordered_json merged = command_defaults(command);
  for (const auto& [key, value] : file.items())
    if (key != "command") merged[key] = value;

  // Flags win over the file.
  if (app.count("--preset")) merged["preset"] = preset;
  if (app.count("--theta")) merged["theta"] = thetas;
  if (app.count("--lambda")) merged["lambda"] = lambda;
  if (app.count("--tau")) merged["tau"] = tau;
  if (app.count("--N")) merged["N"] = n_modes;
  if (app.count("--epsilon")) merged["epsilon"] = epsilon;
  if (app.count("--eps-margin")) merged["eps_margin"] = eps_margin;
  if (app.count("--K2")) merged["K2"] = K2;
  if (app.count("--q-spectrum-exponent"))
    merged["q_spectrum_exponent"] = q_exponent;
  if (app.count("--n")) merged["n"] = n;
  if (app.count("--paths")) merged["paths"] = paths;
  if (app.count("--mc-paths")) merged["mc_paths"] = mc_paths;
  if (app.count("--seed")) merged["seed"] = seed;
  if (app.count("--burn-in")) merged["burn_in"] = burn_in;
  if (app.count("--box")) merged["box"] = box;
  if (app.count("--probe")) merged["probe"] = probe;
  if (app.count("--grid")) merged["grid"] = grid;
  if (app.count("--samples")) merged["samples"] = samples;
  if (app.count("--tolerance")) merged["tolerance"] = tolerance;
  if (app.count("--rho")) merged["rho"] = rho;
  if (app.count("--beta")) merged["beta"] = beta;
  if (app.count("--x0")) merged["x0"] = x0;
  if (app.count("--density-mode")) merged["density_mode"] = density_mode;
  if (app.count("--unsafe")) merged["unsafe"] = true;
  if (app.count("--ks-same-theta-max")) merged["ks_same_theta_max"] = ks_same;
  if (app.count("--ks-cross-theta-max")) merged["ks_cross_theta_max"] = ks_cross;
  if (app.count("--rel-agreement-max")) merged["rel_agreement_max"] = rel_agree;
  if (app.count("--L1")) merged["L1"] = L1;
  if (app.count("--L2")) merged["L2"] = L2;
  if (app.count("--L3")) merged["L3"] = L3;
  if (app.count("--outdir")) merged["outdir"] = outdir;
  if (app.count("--threads")) merged["threads"] = threads;

  ExperimentConfig cfg;
  cfg.command = command;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  cfg.L1_override = nan;
  cfg.L2_override = nan;
  cfg.L3_override = nan;

  if (merged.contains("preset")) cfg.preset = merged["preset"].get<std::string>();
  if (merged.contains("theta")) cfg.thetas = as_double_list(merged["theta"], "theta");
  if (merged.contains("lambda")) {
    cfg.lambda = as_double(merged["lambda"], "lambda");
    cfg.lambda_given = true;
  }
  if (merged.contains("tau")) cfg.tau = as_double(merged["tau"], "tau");
  if (merged.contains("N")) cfg.n_modes = static_cast<int>(as_long(merged["N"], "N"));
  if (merged.contains("epsilon")) cfg.epsilon = as_double(merged["epsilon"], "epsilon");
  if (merged.contains("eps_margin"))
    cfg.eps_margin = as_double(merged["eps_margin"], "eps_margin");
  if (merged.contains("K2")) cfg.K2 = as_double(merged["K2"], "K2");
  if (merged.contains("q_spectrum_exponent"))
    cfg.q_exponent =
        as_double(merged["q_spectrum_exponent"], "q_spectrum_exponent");
  if (merged.contains("n")) cfg.n = as_long(merged["n"], "n");
  if (merged.contains("paths")) cfg.paths = as_long(merged["paths"], "paths");
  if (merged.contains("mc_paths"))
    cfg.mc_paths = as_long(merged["mc_paths"], "mc_paths");
  if (merged.contains("seed"))
    cfg.seed = static_cast<std::uint64_t>(as_long(merged["seed"], "seed"));
  if (merged.contains("burn_in")) cfg.burn_in = as_long(merged["burn_in"], "burn_in");
  if (merged.contains("box")) {
    const auto b = as_double_list(merged["box"], "box");
    if (b.size() != 2) throw UsageError("key 'box' must have two entries");
    cfg.box_lo = b[0];
    cfg.box_hi = b[1];
  }
  if (merged.contains("probe")) {
    const auto b = as_double_list(merged["probe"], "probe");
    if (b.size() != 2) throw UsageError("key 'probe' must have two entries");
    cfg.probe_lo = b[0];
    cfg.probe_hi = b[1];
  }
  if (merged.contains("grid")) cfg.grid = static_cast<int>(as_long(merged["grid"], "grid"));
  if (merged.contains("samples")) cfg.samples = as_long(merged["samples"], "samples");
  if (merged.contains("tolerance"))
    cfg.tolerance = as_double(merged["tolerance"], "tolerance");
  if (merged.contains("rho")) cfg.rho = as_double(merged["rho"], "rho");
  if (merged.contains("beta")) cfg.beta = as_double(merged["beta"], "beta");
  if (merged.contains("x0")) cfg.x0 = as_double_list(merged["x0"], "x0");
  if (merged.contains("density_mode"))
    cfg.density_mode = merged["density_mode"].get<std::string>();
  if (merged.contains("unsafe")) cfg.unsafe = merged["unsafe"].get<bool>();
  if (merged.contains("ks_same_theta_max"))
    cfg.ks_same_theta_max = as_double(merged["ks_same_theta_max"], "ks_same_theta_max");
  if (merged.contains("ks_cross_theta_max"))
    cfg.ks_cross_theta_max = as_double(merged["ks_cross_theta_max"], "ks_cross_theta_max");
  if (merged.contains("rel_agreement_max"))
    cfg.rel_agreement_max = as_double(merged["rel_agreement_max"], "rel_agreement_max");
  if (merged.contains("L1")) cfg.L1_override = as_double(merged["L1"], "L1");
  if (merged.contains("L2")) cfg.L2_override = as_double(merged["L2"], "L2");
  if (merged.contains("L3")) cfg.L3_override = as_double(merged["L3"], "L3");
  if (merged.contains("outdir")) cfg.outdir = merged["outdir"].get<std::string>();
  if (merged.contains("threads"))
    cfg.threads = static_cast<int>(as_long(merged["threads"], "threads"));

  if (cfg.density_mode != "terminal" && cfg.density_mode != "along-path")
    throw UsageError("key 'density_mode' must be 'terminal' or 'along-path'");

  // Certificate commands require theta in [1/2, 1]; smaller theta sits
  // outside the certified regime and needs an explicit override.
  for (double theta : cfg.thetas) {
    if (theta > 1.0 || theta < 0.0)
      throw UsageError("key 'theta' must lie in [0,1]");
    if (theta < 0.5 && !cfg.unsafe)
      throw UsageError(
          "theta in [1/2,1] required for certificates (key 'theta'; pass "
          "--unsafe to simulate anyway)");
  }
  if (cfg.lambda_given && !cfg.thetas.empty()) {
    const double theta = cfg.thetas.front();
    if (theta == 0.5 ? cfg.lambda != 0.0
                     : (cfg.lambda <= 0.0 || cfg.lambda > 2.0 * theta - 1.0))
      throw UsageError("key 'lambda' must lie in (0, 2*theta-1] (0 at theta=1/2)");
  }
  if (!(cfg.tau > 0.0) || !(cfg.tau < 1.0))
    throw UsageError("key 'tau' must lie in (0,1)");
  return cfg;
}

}  // namespace ergocli
