#include "jred/kernels.hpp"

namespace jred::kernels {
namespace {

// Four partial sums, so rounding behaves like the vector variants.
double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += x[i] * y[i];
    s1 += x[i + 1] * y[i + 1];
    s2 += x[i + 2] * y[i + 2];
    s3 += x[i + 3] * y[i + 3];
  }
  for (; i < n; ++i) s0 += x[i] * y[i];
  return (s0 + s1) + (s2 + s3);
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

double sumsq_scalar(const double* x, std::size_t n) { return dot_scalar(x, x, n); }

}  // namespace

const Table& scalar_table() {
  static const Table t{"scalar", dot_scalar, axpy_scalar, scale_scalar, sumsq_scalar};
  return t;
}

}  // namespace jred::kernels
