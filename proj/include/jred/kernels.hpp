#pragma once

#include <cstddef>
#include <string_view>

// Dense vector kernels used by the svec linear algebra. A scalar reference
// implementation is always available; SIMD variants are picked once at
// startup from the running CPU. Set JR_KERNELS=scalar to force the reference.
namespace jred::kernels {

struct Table {
  const char* name;
  double (*dot)(const double* x, const double* y, std::size_t n);
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  void (*scale)(double a, double* x, std::size_t n);
  double (*sumsq)(const double* x, std::size_t n);
};

const Table& scalar_table();
// Null when the variant was not compiled in or the CPU lacks support.
const Table* avx2_table();
const Table* neon_table();

const Table& active();
std::string_view active_name();

inline double dot(const double* x, const double* y, std::size_t n) {
  return active().dot(x, y, n);
}
inline void axpy(double a, const double* x, double* y, std::size_t n) {
  active().axpy(a, x, y, n);
}
inline void scale(double a, double* x, std::size_t n) { active().scale(a, x, n); }
inline double sumsq(const double* x, std::size_t n) { return active().sumsq(x, n); }

}  // namespace jred::kernels
