#include "asaedct/dct.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "asaedct/error.hpp"

namespace asaedct {
namespace {

std::shared_ptr<const Matrix> build_matrix(Index n) {
  auto m = std::make_shared<Matrix>(n, n);
  const double dc = std::sqrt(1.0 / static_cast<double>(n));
  const double ac = std::sqrt(2.0 / static_cast<double>(n));
  const double step = std::numbers::pi / static_cast<double>(n);
  for (Index k = 0; k < n; ++k) {
    (*m)(k, 0) = dc;
    for (Index j = 1; j < n; ++j) {
      (*m)(k, j) = ac * std::cos(step * (static_cast<double>(k) + 0.5) *
                                 static_cast<double>(j));
    }
  }
  return m;
}

std::shared_ptr<const Matrix> cached_matrix(Index n) {
  static std::mutex mu;
  static std::map<Index, std::shared_ptr<const Matrix>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = build_matrix(n);
  return slot;
}

void check_input(const Vector& v, Index n, const char* what) {
  if (v.size() != n) {
    throw Error(ErrorKind::kShapeMismatch,
                std::string(what) + ": expected length " + std::to_string(n) +
                    ", got " + std::to_string(v.size()));
  }
  if (!v.allFinite()) {
    throw Error(ErrorKind::kNonFinite,
                std::string(what) + ": input contains NaN or Inf");
  }
}

}  // namespace

Dct3::Dct3(Index n) {
  if (n < 2) {
    throw Error(ErrorKind::kInvalidArgument,
                "DCT length must be at least 2, got " + std::to_string(n));
  }
  matrix_ = cached_matrix(n);
}

Vector Dct3::forward(const Vector& x) const {
  check_input(x, size(), "dct3_forward");
  return *matrix_ * x;
}

Vector Dct3::inverse(const Vector& coeffs) const {
  check_input(coeffs, size(), "dct3_inverse");
  return matrix_->transpose() * coeffs;
}

Vector dct3_forward(const Vector& x) { return Dct3(x.size()).forward(x); }

Vector dct3_inverse(const Vector& coeffs) {
  return Dct3(coeffs.size()).inverse(coeffs);
}

FgVectors FgVectors::make(Index n) {
  if (n < 2) {
    throw Error(ErrorKind::kInvalidArgument, "FgVectors: length must be >= 2");
  }
  FgVectors fg;
  const double nd = static_cast<double>(n);
  fg.g = Vector::Constant(n, std::sqrt(1.0 / (2.0 * nd)));
  fg.g[0] = 1.0 / (2.0 * std::sqrt(nd));
  fg.f = fg.g.cwiseInverse();
  return fg;
}

Vector symmetric_convolve_via_dct(const Vector& x, const Vector& w,
                                  const FgVectors& fg) {
  const Index n = x.size();
  if (w.size() != n || fg.f.size() != n || fg.g.size() != n) {
    throw Error(ErrorKind::kShapeMismatch,
                "symmetric_convolve_via_dct: x, w, f, g must share one length");
  }
  const Dct3 dct(n);
  const Vector xs = dct.forward(x.cwiseProduct(fg.f));
  const Vector ws = dct.forward(w.cwiseProduct(fg.f));
  return dct.inverse(xs.cwiseProduct(ws)).cwiseProduct(fg.g);
}

}  // namespace asaedct
