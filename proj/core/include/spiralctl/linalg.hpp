#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace spiralctl::linalg {

/// Small dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }
  [[nodiscard]] bool square() const { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  [[nodiscard]] double trace() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct EigenOptions {
  int max_sweeps = 1000;  ///< total shifted-QR sweeps over all eigenvalues
};

/// All eigenvalues of a real square matrix (Hessenberg reduction and shifted QR).
/// Throws NumericalError when the sweep budget runs out.
[[nodiscard]] std::vector<std::complex<double>> eigenvalues(const Matrix& m,
                                                            const EigenOptions& opts = {});

/// Determinant by LU with partial pivoting.
[[nodiscard]] double determinant(Matrix m);

/// Roots of c[0] s^n + c[1] s^(n-1) + ... + c[n] via the companion matrix. c[0] must be nonzero.
[[nodiscard]] std::vector<std::complex<double>> polynomial_roots(std::span<const double> coeffs);

}  // namespace spiralctl::linalg
