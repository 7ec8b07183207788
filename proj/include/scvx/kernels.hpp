#pragma once

// Dense vector kernels used by the interior-point solver, residual checks and
// the region sampler. Each kernel has a scalar reference implementation and,
// where the target supports it, an AVX2/FMA or NEON variant. The variant is
// chosen once per process from the CPU capabilities; SCVX_ISA=scalar in the
// environment forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace scvx::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

/// Function table for one instruction set. All kernels require equal-length
/// spans where two are given; lengths are checked in the dispatching wrappers.
struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y = alpha * x + beta * y
  void (*axpby)(double alpha, const double* x, double beta, double* y, std::size_t n);
  double (*sum_squares)(const double* x, std::size_t n);
  double (*max_abs)(const double* x, std::size_t n);
};

const KernelTable& scalar_table();
/// Returns nullptr when the variant was not compiled in or the CPU lacks it.
const KernelTable* avx2_table();
const KernelTable* neon_table();

/// Table selected for this process.
const KernelTable& active();
Isa active_isa();

double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void axpby(double alpha, std::span<const double> x, double beta, std::span<double> y);
double sum_squares(std::span<const double> x);
double norm2(std::span<const double> x);
double max_abs(std::span<const double> x);

}  // namespace scvx::kernels
