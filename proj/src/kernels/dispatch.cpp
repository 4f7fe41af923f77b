#include <cstdlib>
#include <cstring>

#include "jred/kernels.hpp"

namespace jred::kernels {

#if defined(JRED_HAVE_AVX2)
const Table* avx2_table_impl();
#endif
#if defined(JRED_HAVE_NEON)
const Table* neon_table_impl();
#endif

const Table* avx2_table() {
#if defined(JRED_HAVE_AVX2)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return avx2_table_impl();
#endif
  return nullptr;
}

const Table* neon_table() {
#if defined(JRED_HAVE_NEON)
  return neon_table_impl();
#else
  return nullptr;
#endif
}

namespace {

const Table& pick() {
  const char* env = std::getenv("JR_KERNELS");
  if (env && std::strcmp(env, "scalar") == 0) return scalar_table();
  if (const Table* t = avx2_table()) return *t;
  if (const Table* t = neon_table()) return *t;
  return scalar_table();
}

}  // namespace

const Table& active() {
  static const Table& t = pick();
  return t;
}

std::string_view active_name() { return active().name; }

}  // namespace jred::kernels
