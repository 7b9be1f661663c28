#pragma once

// Dense double-precision kernels behind every inner loop of the library.
//
// Each kernel exists as a scalar reference implementation and, on x86-64
// builds, as an AVX2/FMA variant. The variant is picked once at startup from
// the CPU feature bits; NEPFW_KERNELS=scalar in the environment forces the
// reference path. Matrices are row-major and densely packed.

#include <cstddef>
#include <span>
#include <string_view>

namespace nepfw::kernels {

struct KernelTable {
    std::string_view name;
    // sum_i x[i] * y[i]
    double (*dot)(const double* x, const double* y, std::size_t n);
    // sum_i (x[i] - y[i])^2
    double (*squared_distance)(const double* x, const double* y, std::size_t n);
    // y[i] += a * x[i]
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    // y[i] = a * x[i] + b * y[i]
    void (*axpby)(double a, const double* x, double b, double* y, std::size_t n);
    // y = A x, A is rows x cols
    void (*gemv)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
    // y = A^T x, A is rows x cols
    void (*gemv_transposed)(const double* a, std::size_t rows, std::size_t cols, const double* x,
                            double* y);
};

const KernelTable& scalar_table();

/// AVX2/FMA table, or nullptr when it was not compiled in or the CPU lacks the
/// required features.
const KernelTable* avx2_table();

/// The table used by the free functions below.
const KernelTable& active_table();

double dot(std::span<const double> x, std::span<const double> y);
double squared_distance(std::span<const double> x, std::span<const double> y);
double squared_norm(std::span<const double> x);
void axpy(double a, std::span<const double> x, std::span<double> y);
void axpby(double a, std::span<const double> x, double b, std::span<double> y);
void gemv(std::span<const double> a, std::size_t rows, std::size_t cols, std::span<const double> x,
          std::span<double> y);
void gemv_transposed(std::span<const double> a, std::size_t rows, std::size_t cols,
                     std::span<const double> x, std::span<double> y);

}  // namespace nepfw::kernels
