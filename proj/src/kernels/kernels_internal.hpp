#pragma once

#include <cstddef>

namespace scvx::kernels {

namespace scalar_impl {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void axpby(double alpha, const double* x, double beta, double* y, std::size_t n);
double sum_squares(const double* x, std::size_t n);
double max_abs(const double* x, std::size_t n);
}  // namespace scalar_impl

#if defined(SCVX_HAVE_AVX2)
namespace avx2_impl {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void axpby(double alpha, const double* x, double beta, double* y, std::size_t n);
double sum_squares(const double* x, std::size_t n);
double max_abs(const double* x, std::size_t n);
}  // namespace avx2_impl
#endif

#if defined(SCVX_HAVE_NEON)
namespace neon_impl {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void axpby(double alpha, const double* x, double beta, double* y, std::size_t n);
double sum_squares(const double* x, std::size_t n);
double max_abs(const double* x, std::size_t n);
}  // namespace neon_impl
#endif

}  // namespace scvx::kernels
