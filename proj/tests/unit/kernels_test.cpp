#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "jred/kernels.hpp"
#include "jred/random.hpp"

using namespace jred;

namespace {

std::vector<const kernels::Table*> simd_tables() {
  std::vector<const kernels::Table*> t;
  if (auto* a = kernels::avx2_table()) t.push_back(a);
  if (auto* n = kernels::neon_table()) t.push_back(n);
  return t;
}

std::vector<double> random_vec(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

}  // namespace

TEST(Kernels, ActiveTableIsNamed) {
  EXPECT_FALSE(kernels::active_name().empty());
}

TEST(Kernels, ScalarDotMatchesNaiveLoop) {
  Rng rng(1);
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 64u, 1001u}) {
    auto x = random_vec(rng, n), y = random_vec(rng, n);
    long double ref = 0;
    for (std::size_t i = 0; i < n; ++i) ref += static_cast<long double>(x[i]) * y[i];
    EXPECT_NEAR(kernels::scalar_table().dot(x.data(), y.data(), n), static_cast<double>(ref), 1e-12 * (1 + n));
  }
}

TEST(Kernels, SimdVariantsMatchScalar) {
  const auto& ref = kernels::scalar_table();
  Rng rng(7);
  for (const kernels::Table* t : simd_tables()) {
    for (std::size_t n : {0u, 1u, 2u, 3u, 5u, 8u, 9u, 17u, 128u, 8256u}) {
      auto x = random_vec(rng, n), y = random_vec(rng, n);
      double scale = std::sqrt(ref.sumsq(x.data(), n) * ref.sumsq(y.data(), n)) + 1;
      EXPECT_NEAR(t->dot(x.data(), y.data(), n), ref.dot(x.data(), y.data(), n), 1e-13 * scale) << t->name << n;
      EXPECT_NEAR(t->sumsq(x.data(), n), ref.sumsq(x.data(), n), 1e-13 * (ref.sumsq(x.data(), n) + 1));

      auto y1 = y, y2 = y;
      ref.axpy(-0.37, x.data(), y1.data(), n);
      t->axpy(-0.37, x.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y1[i], y2[i], 1e-15 * (std::abs(y1[i]) + 1));

      auto z1 = x, z2 = x;
      ref.scale(2.5, z1.data(), n);
      t->scale(2.5, z2.data(), n);
      for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(z1[i], z2[i]);
    }
  }
}
