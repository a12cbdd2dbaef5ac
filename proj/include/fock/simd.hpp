#pragma once

// Data-parallel inner loops over points of the complex plane (n = 1).
//
// Every kernel has a scalar reference in fock::simd::scalar and, on x86-64, an AVX2+FMA
// variant in fock::simd::avx2. The unqualified entry points dispatch at runtime on the
// detected CPU; FOCK_SIMD=scalar in the environment pins the reference path.

#include <complex>
#include <span>
#include <string_view>

namespace fock::simd {

enum class Level { scalar, avx2 };

Level detected_level();
Level active_level();

/// Overrides the active level; requests above the detected level are clamped.
void set_level(Level level);

std::string_view name(Level level);

/// A kernel combination sum_j c_j k_{w_j}, coordinates split by real/imaginary part.
struct ComboView {
    std::span<const double> coeff_re;
    std::span<const double> coeff_im;
    std::span<const double> center_re;
    std::span<const double> center_im;

    std::size_t size() const { return coeff_re.size(); }
};

#define FOCK_SIMD_KERNEL_DECLS                                                                 \
    void min_dist2(std::span<const double> px, std::span<const double> py,                     \
                   std::span<const double> cx, std::span<const double> cy,                     \
                   std::span<double> out);                                                     \
    void count_within(std::span<const double> px, std::span<const double> py,                  \
                      std::span<const double> cx, std::span<const double> cy, double radius2, \
                      std::span<int> out);                                                     \
    double gauss_sum(std::span<const double> x, std::span<const double> y,                     \
                     std::span<const double> w, double cx, double cy, double rate);            \
    std::complex<double> combo_damped(const ComboView& combo, double alpha, double zx,         \
                                      double zy);

/// min_dist2: out[i] = min_k |p_i - c_k|^2 (infinity when there are no centers).
/// count_within: out[i] = #{k : |p_i - c_k|^2 < radius2}.
/// gauss_sum: sum_i w_i exp(-rate |(x_i, y_i) - (cx, cy)|^2).
/// combo_damped: f(z) exp(-alpha |z|^2 / 2) for the combination f.
FOCK_SIMD_KERNEL_DECLS

namespace scalar {
FOCK_SIMD_KERNEL_DECLS
}

#if defined(FOCK_HAVE_AVX2)
namespace avx2 {
FOCK_SIMD_KERNEL_DECLS
}
#endif

#undef FOCK_SIMD_KERNEL_DECLS

} // namespace fock::simd
