#pragma once

#include <cstddef>

namespace nepfw::kernels {

namespace scalar {
double dot(const double* x, const double* y, std::size_t n);
double squared_distance(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void axpby(double a, const double* x, double b, double* y, std::size_t n);
void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
void gemv_transposed(const double* a, std::size_t rows, std::size_t cols, const double* x,
                     double* y);
}  // namespace scalar

#ifdef NEPFW_HAVE_AVX2
namespace avx2 {
double dot(const double* x, const double* y, std::size_t n);
double squared_distance(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void axpby(double a, const double* x, double b, double* y, std::size_t n);
void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
void gemv_transposed(const double* a, std::size_t rows, std::size_t cols, const double* x,
                     double* y);
}  // namespace avx2
#endif

}  // namespace nepfw::kernels
