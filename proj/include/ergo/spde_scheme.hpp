#pragma once

#include <cstdint>
#include <functional>

#include "ergo/lyapunov.hpp"
#include "ergo/rng.hpp"
#include "ergo/spectral_space.hpp"
#include "ergo/types.hpp"

namespace ergo {

/// Semilinear SPDE  dX = (Laplace X + f(X)) dt + g(X) dW  on (0,1) with
/// Dirichlet boundary, driven by a Q-Wiener process whose covariance
/// eigenvalues on the sine basis are q_spectrum. Structural constants:
///   (f(u)-f(v))(u-v) <= K1 (u-v)^2,   f(u) u <= K2 u^2 + K3,
///   |f'(u)| <= K4 |u|^{q-1} + K5,
///   |G(x)-G(y)|^2 <= K6 |x-y|^2,      |G(x)|^2 <= K7 |x|^2 + K8.
struct SpdeProblem {
  std::function<double(double)> f;      // reaction
  std::function<double(double)> jac_f;  // f'
  std::function<double(double)> g;      // pointwise diffusion; 1 for additive
  double K1 = 0.0, K2 = 0.0, K3 = 0.0, K4 = 0.0, K5 = 0.0;
  double q_growth = 1.0;
  double K6 = 0.0, K7 = 0.0, K8 = 0.0;
  Vec q_spectrum;  // length >= N, strictly positive

  void validate(const SpectralSpace& space) const;
};

/// Allen-Cahn constants for f(u) = eps^{-2}(u - u^3), g == 1:
/// K1 = eps^{-2}, q = 3, K4 = 2 eps^{-2}, K5 = eps^{-2}, K6 = K7 = 0,
/// K8 = trace of the (truncated) noise covariance, K2 any negative scalar,
/// K3 = (eps^{-2} + |K2|)^2 eps^2 / 4 from maximizing
/// (eps^{-2}+|K2|) u^2 - eps^{-2} u^4.
struct AllenCahnParams {
  double epsilon = 0.5;
  double K1 = 0.0, K2 = -1.0, K3 = 0.0, K4 = 0.0, K5 = 0.0;
  double K6 = 0.0, K7 = 0.0, K8 = 0.0;
  double q_growth = 3.0;
};

AllenCahnParams allen_cahn_constants(double epsilon, double K2_choice,
                                     const Vec& q_spectrum);

SpdeProblem make_allen_cahn(double epsilon, double K2_choice,
                            const Vec& q_spectrum);

/// f == 0, g == 1: the linear additive benchmark with a mode-wise closed
/// form, used as the implicit-step oracle.
SpdeProblem make_linear_additive(const Vec& q_spectrum);

/// q_k = k^{-exponent}, k = 1..n.
Vec default_q_spectrum(int n, double exponent = 2.0);

/// One Q-Wiener increment on V_N: coefficients are independent
/// N(0, q_k tau) draws from the counter stream at the given step.
SpectralField qwiener_increment(const SpectralSpace& space,
                                const Vec& q_spectrum, double tau,
                                const rng::Stream& stream, std::uint64_t step);

/// Projection of the pointwise lift of f: evaluates the field on the
/// collocation grid, applies f, and projects back onto the first N modes.
SpectralField nemytskii_project(const SpectralField& x,
                                const std::function<double(double)>& f,
                                const SpectralSpace& space);

struct DiegConfig {
  double tau = 0.1;
  double newton_tol = 1e-12;
  int newton_max_iter = 50;
  bool fixed_point_fallback = true;
  int fixed_point_max_iter = 1000;
};

/// Drift-implicit Euler step on V_N: given state x and noise increment dW,
/// returns the unique y with
///   (I + tau Lambda) y - tau P_N F(y) = x + P_N(G(x) dW),
/// solvable when (K1 - lambda_1) tau < 1. Keeps per-instance scratch; use
/// one stepper per thread.
class DiegStepper {
 public:
  DiegStepper(const SpectralSpace& space, const SpdeProblem& problem,
              const DiegConfig& config);

  void step(const SpectralField& x, const SpectralField& dW,
            SpectralField& out);

  /// Solves hat_F(y) = rhs directly (rhs already includes the noise term).
  void implicit_solve(const Vec& rhs, const Vec& y_init, Vec& out);

  const SpectralSpace& space() const { return space_; }

 private:
  double residual(const Vec& y, const Vec& rhs, Vec& res);

  const SpectralSpace& space_;
  SpdeProblem problem_;
  DiegConfig config_;
  Vec one_plus_tau_lambda_;
  // scratch
  Vec grid_vals_, grid_fvals_, proj_, res_, y_, trial_, newton_step_, rhs_;
  Vec noise_grid_;
  Mat jac_;
};

/// V(x) = |x|^2 + c |grad x|^2 + 1 with
/// c = 2 eps_margin tau / ((1 + 2 (lambda_1 - K2 - eps_margin) tau) lambda_1).
double lyapunov_spde(const SpectralField& x, const SpdeProblem& problem,
                     const SpectralSpace& space, double tau, double eps_margin);

/// rho = (1 + K7 tau) / (1 + 2 (lambda_1 - K2 - eps_margin) tau),
/// kappa = (2 K3 + K8) tau / (1 + 2 (lambda_1 - K2 - eps_margin) tau)
///         + (1 - rho).
DriftConstants drift_constants_spde(const SpdeProblem& problem,
                                    const SpectralSpace& space, double tau,
                                    double eps_margin);

/// Monte Carlo check of the one-step drift inequality for the full
/// discretization, with a 3-standard-error acceptance band.
DriftVerdict verify_drift_mc_spde(const SpectralField& x,
                                  const SpdeProblem& problem,
                                  const SpectralSpace& space, double tau,
                                  double eps_margin, long mc_paths,
                                  std::uint64_t seed, int threads = 1);

}  // namespace ergo
