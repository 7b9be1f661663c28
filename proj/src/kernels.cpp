#include "nepfw/kernels.hpp"

#include <cassert>
#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"

namespace nepfw::kernels {

namespace {

constexpr KernelTable kScalar{
    "scalar",      scalar::dot,  scalar::squared_distance,
    scalar::axpy,  scalar::axpby, scalar::gemv,
    scalar::gemv_transposed,
};

#ifdef NEPFW_HAVE_AVX2
constexpr KernelTable kAvx2{
    "avx2",      avx2::dot,   avx2::squared_distance,
    avx2::axpy,  avx2::axpby, avx2::gemv,
    avx2::gemv_transposed,
};
#endif

bool cpu_has_avx2() {
#if defined(NEPFW_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable& select_table() {
    if (const char* env = std::getenv("NEPFW_KERNELS"); env && std::string_view(env) == "scalar") {
        return kScalar;
    }
    if (const KernelTable* t = avx2_table()) return *t;
    return kScalar;
}

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

const KernelTable* avx2_table() {
#ifdef NEPFW_HAVE_AVX2
    static const bool supported = cpu_has_avx2();
    return supported ? &kAvx2 : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& active_table() {
    static const KernelTable& table = select_table();
    return table;
}

double dot(std::span<const double> x, std::span<const double> y) {
    assert(x.size() == y.size());
    return active_table().dot(x.data(), y.data(), x.size());
}

double squared_distance(std::span<const double> x, std::span<const double> y) {
    assert(x.size() == y.size());
    return active_table().squared_distance(x.data(), y.data(), x.size());
}

double squared_norm(std::span<const double> x) { return dot(x, x); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
    assert(x.size() == y.size());
    active_table().axpy(a, x.data(), y.data(), x.size());
}

void axpby(double a, std::span<const double> x, double b, std::span<double> y) {
    assert(x.size() == y.size());
    active_table().axpby(a, x.data(), b, y.data(), x.size());
}

void gemv(std::span<const double> a, std::size_t rows, std::size_t cols, std::span<const double> x,
          std::span<double> y) {
    assert(a.size() == rows * cols && x.size() == cols && y.size() == rows);
    active_table().gemv(a.data(), rows, cols, x.data(), y.data());
}

void gemv_transposed(std::span<const double> a, std::size_t rows, std::size_t cols,
                     std::span<const double> x, std::span<double> y) {
    assert(a.size() == rows * cols && x.size() == rows && y.size() == cols);
    active_table().gemv_transposed(a.data(), rows, cols, x.data(), y.data());
}

}  // namespace nepfw::kernels
