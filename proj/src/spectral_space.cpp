#include "ergo/spectral_space.hpp"

#include <cmath>

#include "ergo/csv.hpp"
#include "ergo/errors.hpp"

namespace ergo {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kSqrt2 = 1.41421356237309504880168872420969808;
}  // namespace

SpectralSpace::SpectralSpace(int n_modes, int collocation_size) : n_(n_modes) {
  if (n_ < 1) throw PreconditionError("SpectralSpace: need at least one mode");
  m_ = collocation_size < 0 ? 4 * n_ + 1 : collocation_size;
  if (m_ < 2 * n_ + 1)
    throw PreconditionError(
        "SpectralSpace: collocation_size must be >= 2N+1");

  eigenvalues_.resize(n_);
  for (int k = 1; k <= n_; ++k)
    eigenvalues_(k - 1) = (k * kPi) * (k * kPi);

  nodes_.resize(m_);
  for (int i = 1; i <= m_; ++i)
    nodes_(i - 1) = static_cast<double>(i) / (m_ + 1);

  eval_matrix_.resize(m_, n_);
  for (int i = 0; i < m_; ++i)
    for (int k = 1; k <= n_; ++k)
      eval_matrix_(i, k - 1) = kSqrt2 * std::sin(k * kPi * nodes_(i));
}

void SpectralSpace::eval_on_grid(const SpectralField& coeffs,
                                 Vec& values) const {
  values.noalias() = eval_matrix_ * coeffs;
}

void SpectralSpace::project(const Vec& values, SpectralField& coeffs) const {
  coeffs.noalias() = eval_matrix_.transpose() * values;
  coeffs /= static_cast<double>(m_ + 1);
}

double SpectralSpace::eval_at(const SpectralField& coeffs, double xi) const {
  double v = 0.0;
  for (int k = 1; k <= n_; ++k)
    v += coeffs(k - 1) * kSqrt2 * std::sin(k * kPi * xi);
  return v;
}

double SpectralSpace::eval_deriv_at(const SpectralField& coeffs,
                                    double xi) const {
  double v = 0.0;
  for (int k = 1; k <= n_; ++k)
    v += coeffs(k - 1) * kSqrt2 * k * kPi * std::cos(k * kPi * xi);
  return v;
}

double SpectralSpace::quadrature(
    const std::function<double(double)>& f) const {
  double sum = 0.5 * (f(0.0) + f(1.0));
  for (int i = 0; i < m_; ++i) sum += f(nodes_(i));
  return sum / (m_ + 1);
}

Mat SpectralSpace::gram_matrix() const {
  return eval_matrix_.transpose() * eval_matrix_ /
         static_cast<double>(m_ + 1);
}

SpectralField sine_sum_field(const SpectralSpace& space, int max_k) {
  if (max_k > space.modes())
    throw PreconditionError("sine_sum_field: max_k exceeds mode count");
  SpectralField coeffs = SpectralField::Zero(space.modes());
  for (int k = 1; k <= max_k; ++k) coeffs(k - 1) = 1.0 / kSqrt2;
  return coeffs;
}

void write_field_coeff_csv(std::ostream& os, const SpectralField& coeffs) {
  os << "k,coeff\n";
  for (int k = 0; k < coeffs.size(); ++k)
    os << (k + 1) << "," << csv::fmt(coeffs(k)) << "\n";
}

void write_field_value_csv(std::ostream& os, const SpectralSpace& space,
                           const SpectralField& coeffs) {
  os << "xi,u(xi)\n";
  os << "0,0\n";
  for (int i = 0; i < space.collocation_size(); ++i)
    os << csv::fmt(space.nodes()(i)) << ","
       << csv::fmt(space.eval_at(coeffs, space.nodes()(i))) << "\n";
  os << "1,0\n";
}

}  // namespace ergo
