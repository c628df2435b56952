#include "spiralctl/linalg.hpp"

#include <algorithm>

#include <Eigen/Dense>

#include "spiralctl/errors.hpp"

namespace spiralctl::linalg {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

double Matrix::trace() const {
  double s = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
  return s;
}

namespace {

Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c)
      e(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m(r, c);
  return e;
}

}  // namespace

std::vector<std::complex<double>> eigenvalues(const Matrix& m, const EigenOptions& opts) {
  if (!m.square()) throw ConfigError("eigenvalues: matrix must be square");
  if (opts.max_sweeps < 1) throw ConfigError("eigenvalues: sweep budget must be positive");
  if (m.rows() == 0) return {};
  Eigen::EigenSolver<Eigen::MatrixXd> solver;
  solver.setMaxIterations(static_cast<Eigen::Index>(opts.max_sweeps));
  solver.compute(to_eigen(m), false);
  if (solver.info() != Eigen::Success)
    throw NumericalError("eigenvalues: QR iteration did not converge within budget");
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

double determinant(Matrix m) {
  if (!m.square()) throw ConfigError("determinant: matrix must be square");
  if (m.rows() == 0) return 1.0;
  return to_eigen(m).partialPivLu().determinant();
}

std::vector<std::complex<double>> polynomial_roots(std::span<const double> coeffs) {
  if (coeffs.empty() || coeffs[0] == 0.0)
    throw ConfigError("polynomial_roots: leading coefficient must be nonzero");
  const std::size_t n = coeffs.size() - 1;
  if (n == 0) return {};
  Matrix c(n, n);
  for (std::size_t j = 0; j < n; ++j) c(0, j) = -coeffs[j + 1] / coeffs[0];
  for (std::size_t i = 1; i < n; ++i) c(i, i - 1) = 1.0;
  return eigenvalues(c);
}

}  // namespace spiralctl::linalg
