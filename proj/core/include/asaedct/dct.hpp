#pragma once

#include <memory>

#include <Eigen/Dense>

namespace asaedct {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Orthonormal type-III DCT of fixed length, realized as a dense matrix.
///
/// Row k of the matrix holds sqrt(1/N) in column 0 and
/// sqrt(2/N) * cos(pi/N * (k + 1/2) * n) in column n > 0. The matrix is
/// orthogonal, so the inverse is its transpose (a scaled DCT-II).
/// Matrices are cached per length and shared, so copies are cheap and the
/// object is safe to use from many threads.
class Dct3 {
 public:
  explicit Dct3(Index n);

  Index size() const { return matrix_->rows(); }
  const Matrix& matrix() const { return *matrix_; }

  Vector forward(const Vector& x) const;
  Vector inverse(const Vector& coeffs) const;

 private:
  std::shared_ptr<const Matrix> matrix_;
};

Vector dct3_forward(const Vector& x);
Vector dct3_inverse(const Vector& coeffs);

/// Constant vectors of the DCT convolution theorem: g[0] = 1/(2 sqrt N),
/// g[n] = sqrt(1/(2N)) otherwise, and f = 1/g.
struct FgVectors {
  Vector f;
  Vector g;

  static FgVectors make(Index n);
};

/// D^-1(D(x o f) o D(w o f)) o g, the symmetric convolution of x and w
/// computed in the DCT-III domain. Used for verification only.
Vector symmetric_convolve_via_dct(const Vector& x, const Vector& w,
                                  const FgVectors& fg);

}  // namespace asaedct
