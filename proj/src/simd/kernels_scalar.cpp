#include <algorithm>
#include <cmath>
#include <limits>

#include "fock/simd.hpp"

namespace fock::simd::scalar {

void min_dist2(std::span<const double> px, std::span<const double> py,
               std::span<const double> cx, std::span<const double> cy, std::span<double> out)
{
    for (std::size_t i = 0; i < px.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < cx.size(); ++k) {
            const double dx = px[i] - cx[k];
            const double dy = py[i] - cy[k];
            best = std::min(best, dx * dx + dy * dy);
        }
        out[i] = best;
    }
}

void count_within(std::span<const double> px, std::span<const double> py,
                  std::span<const double> cx, std::span<const double> cy, double radius2,
                  std::span<int> out)
{
    for (std::size_t i = 0; i < px.size(); ++i) {
        int count = 0;
        for (std::size_t k = 0; k < cx.size(); ++k) {
            const double dx = px[i] - cx[k];
            const double dy = py[i] - cy[k];
            count += (dx * dx + dy * dy < radius2) ? 1 : 0;
        }
        out[i] = count;
    }
}

double gauss_sum(std::span<const double> x, std::span<const double> y, std::span<const double> w,
                 double cx, double cy, double rate)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - cx;
        const double dy = y[i] - cy;
        acc += w[i] * std::exp(-rate * (dx * dx + dy * dy));
    }
    return acc;
}

std::complex<double> combo_damped(const ComboView& combo, double alpha, double zx, double zy)
{
    double re = 0.0;
    double im = 0.0;
    const double half = 0.5 * alpha;
    for (std::size_t j = 0; j < combo.size(); ++j) {
        const double wx = combo.center_re[j];
        const double wy = combo.center_im[j];
        const double dx = zx - wx;
        const double dy = zy - wy;
        const double mag = std::exp(-half * (dx * dx + dy * dy));
        const double phase = alpha * (zy * wx - zx * wy);
        const double c = std::cos(phase);
        const double s = std::sin(phase);
        re += mag * (combo.coeff_re[j] * c - combo.coeff_im[j] * s);
        im += mag * (combo.coeff_re[j] * s + combo.coeff_im[j] * c);
    }
    return {re, im};
}

} // namespace fock::simd::scalar
