#pragma once

#include <functional>
#include <ostream>

#include "ergo/types.hpp"

namespace ergo {

/// Coefficient vector in the Dirichlet sine basis e_k(xi) = sqrt(2)
/// sin(k pi xi) on (0,1); entry k-1 multiplies e_k.
using SpectralField = Vec;

/// The N-mode approximation space V_N = span{e_1, ..., e_N} with
/// eigenvalues lambda_k = (k pi)^2 of -Laplace, plus a collocation grid
/// xi_i = i/(M+1), i = 1..M used for pointwise nonlinearities.
///
/// On that grid the discrete sine orthogonality
///   (1/(M+1)) sum_i e_k(xi_i) e_l(xi_i) = delta_kl,  k, l <= M
/// makes project() the exact L^2 projection of any function whose sine
/// bandwidth is at most M; a cubic of an N-mode field has bandwidth 3N, so
/// the default M = 4N+1 keeps cubic nonlinearities quadrature-exact.
class SpectralSpace {
 public:
  explicit SpectralSpace(int n_modes, int collocation_size = -1);

  int modes() const { return n_; }
  int collocation_size() const { return m_; }
  const Vec& eigenvalues() const { return eigenvalues_; }
  double lambda1() const { return eigenvalues_(0); }
  const Vec& nodes() const { return nodes_; }

  /// values_i = x(xi_i); values must be sized M.
  void eval_on_grid(const SpectralField& coeffs, Vec& values) const;

  /// coeffs_k = (1/(M+1)) sum_i values_i e_k(xi_i); exact L^2 projection
  /// for bandwidth <= M.
  void project(const Vec& values, SpectralField& coeffs) const;

  double eval_at(const SpectralField& coeffs, double xi) const;
  double eval_deriv_at(const SpectralField& coeffs, double xi) const;

  /// Composite trapezoid over the closed grid {0, xi_1, ..., xi_M, 1}.
  /// Integrates cos(r pi xi) and sin(r pi xi) exactly for r <= 2M+1, hence
  /// both x^2 and (x')^2 of band-limited fields.
  double quadrature(const std::function<double(double)>& f) const;

  /// Parseval: squared L^2 norm = sum coeffs^2.
  double norm2(const SpectralField& coeffs) const { return coeffs.squaredNorm(); }
  /// Squared H^1_0 seminorm = sum lambda_k coeffs_k^2.
  double grad_norm2(const SpectralField& coeffs) const {
    return (eigenvalues_.array() * coeffs.array().square()).sum();
  }

  /// Discrete Gram matrix of the basis on the collocation grid; identity up
  /// to rounding.
  Mat gram_matrix() const;

  const Mat& eval_matrix() const { return eval_matrix_; }

 private:
  int n_;
  int m_;
  Vec eigenvalues_;
  Vec nodes_;
  Mat eval_matrix_;  // M x N: e_k(xi_i)
};

/// Field with coefficients of sum_{k in ks} sin(k pi xi); each sine has
/// coefficient 1/sqrt(2) in the orthonormal basis.
SpectralField sine_sum_field(const SpectralSpace& space, int max_k);

/// "k,coeff" rows, one per mode.
void write_field_coeff_csv(std::ostream& os, const SpectralField& coeffs);

/// "xi,u(xi)" rows over the closed grid {0, xi_1, ..., xi_M, 1}.
void write_field_value_csv(std::ostream& os, const SpectralSpace& space,
                           const SpectralField& coeffs);

}  // namespace ergo
