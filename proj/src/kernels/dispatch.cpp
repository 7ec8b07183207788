#include "scvx/kernels.hpp"

#include <cassert>
#include <cmath>
#include <cstdlib>
#include <string>

#include "kernels_internal.hpp"

namespace scvx::kernels {

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::scalar, scalar_impl::dot, scalar_impl::axpy,
                                 scalar_impl::axpby, scalar_impl::sum_squares,
                                 scalar_impl::max_abs};
  return table;
}

const KernelTable* avx2_table() {
#if defined(SCVX_HAVE_AVX2)
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  static const KernelTable table{Isa::avx2, avx2_impl::dot, avx2_impl::axpy, avx2_impl::axpby,
                                 avx2_impl::sum_squares, avx2_impl::max_abs};
  return supported ? &table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* neon_table() {
#if defined(SCVX_HAVE_NEON)
  // Advanced SIMD is mandatory on AArch64.
  static const KernelTable table{Isa::neon, neon_impl::dot, neon_impl::axpy, neon_impl::axpby,
                                 neon_impl::sum_squares, neon_impl::max_abs};
  return &table;
#else
  return nullptr;
#endif
}

namespace {

const KernelTable& select() {
  if (const char* forced = std::getenv("SCVX_ISA"); forced && std::string(forced) == "scalar")
    return scalar_table();
  if (const KernelTable* t = avx2_table()) return *t;
  if (const KernelTable* t = neon_table()) return *t;
  return scalar_table();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

Isa active_isa() { return active().isa; }

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active().dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active().axpy(alpha, x.data(), y.data(), x.size());
}

void axpby(double alpha, std::span<const double> x, double beta, std::span<double> y) {
  assert(x.size() == y.size());
  active().axpby(alpha, x.data(), beta, y.data(), x.size());
}

double sum_squares(std::span<const double> x) { return active().sum_squares(x.data(), x.size()); }

double norm2(std::span<const double> x) { return std::sqrt(sum_squares(x)); }

double max_abs(std::span<const double> x) { return active().max_abs(x.data(), x.size()); }

}  // namespace scvx::kernels
