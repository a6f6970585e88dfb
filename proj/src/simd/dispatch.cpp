#include "mee/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace mee::simd {
namespace {

bool cpu_has_avx2() {
#if defined(MEE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa from_env() {
  const char* v = std::getenv("MEE_SIMD");
  if (v == nullptr) return best_available();
  const std::string s(v);
  if (s == "scalar") return Isa::scalar;
  if (s == "avx2" && available(Isa::avx2)) return Isa::avx2;
  if (s == "avx2") return Isa::scalar;
  return best_available();
}

// -1 = not yet resolved.
std::atomic<int> g_active{-1};

} // namespace

std::string_view name(Isa isa) {
  switch (isa) {
  case Isa::scalar: return "scalar";
  case Isa::avx2: return "avx2";
  }
  return "unknown";
}

bool available(Isa isa) {
  switch (isa) {
  case Isa::scalar: return true;
  case Isa::avx2: {
    static const bool ok = cpu_has_avx2();
    return ok;
  }
  }
  return false;
}

Isa best_available() { return available(Isa::avx2) ? Isa::avx2 : Isa::scalar; }

Isa active() {
  int v = g_active.load(std::memory_order_relaxed);
  if (v < 0) {
    v = static_cast<int>(from_env());
    g_active.store(v, std::memory_order_relaxed);
  }
  return static_cast<Isa>(v);
}

void set_active(Isa isa) {
  g_active.store(static_cast<int>(available(isa) ? isa : Isa::scalar));
}

void gauss_row_sums(Isa isa, std::span<const double> targets, std::span<const double> sources,
                    double inv_2h2, std::span<double> kernel_sum,
                    std::span<double> weighted_sum) {
#if defined(MEE_HAVE_AVX2)
  if (isa == Isa::avx2 && available(Isa::avx2)) {
    avx2::gauss_row_sums(targets, sources, inv_2h2, kernel_sum, weighted_sum);
    return;
  }
#endif
  scalar::gauss_row_sums(targets, sources, inv_2h2, kernel_sum, weighted_sum);
}

} // namespace mee::simd
