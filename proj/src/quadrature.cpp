#include "fock/quadrature.hpp"

#include <algorithm>
#include <array>
#include <numbers>
#include <random>

namespace fock {

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int order)
{
    if (order < 1) {
        throw PreconditionError("Gauss-Legendre order must be positive");
    }
    const auto n = static_cast<std::size_t>(order);
    std::vector<double> x(n), w(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = z;
            for (std::size_t k = 2; k <= n; ++k) {
                const double kk = static_cast<double>(k);
                const double p2 = ((2.0 * kk - 1.0) * z * p1 - (kk - 1.0) * p0) / kk;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p0 = 1.0;
                p1 = z;
            }
            dp = static_cast<double>(n) * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) {
                break;
            }
        }
        // Recompute the derivative at the converged root for the weight.
        double p0 = 1.0;
        double p1 = z;
        for (std::size_t k = 2; k <= n; ++k) {
            const double kk = static_cast<double>(k);
            const double p2 = ((2.0 * kk - 1.0) * z * p1 - (kk - 1.0) * p0) / kk;
            p0 = p1;
            p1 = p2;
        }
        dp = static_cast<double>(n) * (z * p1 - p0) / (z * z - 1.0);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    if (n % 2 == 1) {
        x[n / 2] = 0.0;
    }
    return {std::move(x), std::move(w)};
}

QuadratureScheme::QuadratureScheme(int dim, std::vector<double> re, std::vector<double> im,
                                   std::vector<double> weights, int order, double cutoff_radius)
    : dim_(dim), re_(std::move(re)), im_(std::move(im)), weights_(std::move(weights)),
      order_(order), cutoff_(cutoff_radius)
{
    const auto d = static_cast<std::size_t>(dim_);
    if (re_.size() != weights_.size() * d || im_.size() != weights_.size() * d) {
        throw PreconditionError("quadrature scheme: coordinate arrays do not match weights");
    }
}

CPoint QuadratureScheme::node(std::size_t i) const
{
    const auto d = static_cast<std::size_t>(dim_);
    std::vector<cplx> c(d);
    for (std::size_t j = 0; j < d; ++j) {
        c[j] = {re_[i * d + j], im_[i * d + j]};
    }
    return CPoint(std::move(c));
}

void QuadratureScheme::append(const QuadratureScheme& other)
{
    if (other.empty()) {
        return;
    }
    if (empty()) {
        *this = other;
        return;
    }
    if (other.dim_ != dim_) {
        throw DimensionMismatch("cannot merge quadrature schemes of different dimension");
    }
    re_.insert(re_.end(), other.re_.begin(), other.re_.end());
    im_.insert(im_.end(), other.im_.begin(), other.im_.end());
    weights_.insert(weights_.end(), other.weights_.begin(), other.weights_.end());
    order_ = std::max(order_, other.order_);
    cutoff_ = std::max(cutoff_, other.cutoff_);
}

void QuadratureScheme::scale_weights(double s)
{
    for (auto& w : weights_) {
        w *= s;
    }
}

void QuadratureScheme::prune()
{
    const auto d = static_cast<std::size_t>(dim_);
    std::size_t keep = 0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        if (!(weights_[i] > 0.0)) {
            continue;
        }
        for (std::size_t j = 0; j < d; ++j) {
            re_[keep * d + j] = re_[i * d + j];
            im_[keep * d + j] = im_[i * d + j];
        }
        weights_[keep++] = weights_[i];
    }
    weights_.resize(keep);
    re_.resize(keep * d);
    im_.resize(keep * d);
}

QuadratureScheme polar_rule(cplx center, double cutoff, int panels, int gl_order, int angular)
{
    if (!(cutoff > 0.0) || panels < 1 || angular < 1) {
        throw PreconditionError("polar rule needs positive cutoff, panels and angles");
    }
    const auto [gx, gw] = gauss_legendre(gl_order);
    const double u_max = cutoff * cutoff;
    const double h = u_max / panels;
    const double dtheta = 2.0 * std::numbers::pi / angular;

    const std::size_t total = static_cast<std::size_t>(panels) * gx.size() *
                              static_cast<std::size_t>(angular);
    std::vector<double> re, im, w;
    re.reserve(total);
    im.reserve(total);
    w.reserve(total);

    std::vector<double> cos_t(static_cast<std::size_t>(angular));
    std::vector<double> sin_t(static_cast<std::size_t>(angular));
    for (int l = 0; l < angular; ++l) {
        const double theta = dtheta * (l + 0.5);
        cos_t[static_cast<std::size_t>(l)] = std::cos(theta);
        sin_t[static_cast<std::size_t>(l)] = std::sin(theta);
    }
    for (int p = 0; p < panels; ++p) {
        const double a = h * p;
        for (std::size_t g = 0; g < gx.size(); ++g) {
            const double u = a + 0.5 * h * (gx[g] + 1.0);
            const double r = std::sqrt(u);
            // dV = r dr dtheta = (1/2) du dtheta.
            const double weight = 0.5 * (0.5 * h * gw[g]) * dtheta;
            for (std::size_t l = 0; l < cos_t.size(); ++l) {
                re.push_back(center.real() + r * cos_t[l]);
                im.push_back(center.imag() + r * sin_t[l]);
                w.push_back(weight);
            }
        }
    }
    return QuadratureScheme(1, std::move(re), std::move(im), std::move(w), gl_order, cutoff);
}

namespace {

constexpr std::array<int, 24> kPrimes = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,
                                         41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};

double radical_inverse(std::uint64_t i, int base)
{
    double inv = 1.0 / base;
    double f = inv;
    double r = 0.0;
    while (i > 0) {
        r += f * static_cast<double>(i % static_cast<std::uint64_t>(base));
        i /= static_cast<std::uint64_t>(base);
        f *= inv;
    }
    return r;
}

constexpr int kGlOrder = 16;

int round_up(int v, int multiple) { return (v + multiple - 1) / multiple * multiple; }

} // namespace

QuadratureScheme qmc_gaussian_rule(const CPoint& center, double rate, std::size_t count,
                                   std::uint64_t seed)
{
    const int n = center.dim();
    if (2 * n > static_cast<int>(kPrimes.size())) {
        throw Unsupported("quasi-Monte Carlo rule supports n <= 12");
    }
    if (!(rate > 0.0) || count == 0) {
        throw PreconditionError("qmc rule needs a positive rate and at least one point");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> shift(static_cast<std::size_t>(2 * n));
    for (auto& s : shift) {
        s = unif(rng);
    }

    const auto d = static_cast<std::size_t>(n);
    std::vector<double> re(count * d), im(count * d), w(count);
    const double sigma = 1.0 / std::sqrt(rate);
    const double norm = std::pow(std::numbers::pi / rate, n) / static_cast<double>(count);
    double max_r2 = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        double r2_total = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            double u1 = radical_inverse(i + 1, kPrimes[2 * j]) + shift[2 * j];
            double u2 = radical_inverse(i + 1, kPrimes[2 * j + 1]) + shift[2 * j + 1];
            u1 -= std::floor(u1);
            u2 -= std::floor(u2);
            u1 = std::max(u1, 1e-300);
            // |z_j - c_j|^2 ~ Exp(rate): density (rate/pi) exp(-rate |z_j - c_j|^2).
            const double rad = sigma * std::sqrt(-std::log(u1));
            const double ang = 2.0 * std::numbers::pi * u2;
            re[i * d + j] = center[static_cast<int>(j)].real() + rad * std::cos(ang);
            im[i * d + j] = center[static_cast<int>(j)].imag() + rad * std::sin(ang);
            r2_total += rad * rad;
        }
        w[i] = norm * std::exp(rate * r2_total);
        max_r2 = std::max(max_r2, r2_total);
    }
    return QuadratureScheme(n, std::move(re), std::move(im), std::move(w), 0, std::sqrt(max_r2));
}

QuadratureScheme focus_rule(const Focus& focus, int level, const QuadratureOptions& opts)
{
    if (!(focus.rate > 0.0)) {
        throw PreconditionError("focus rate must be positive");
    }
    const int n = focus.center.dim();
    if (n >= 2) {
        // Widen the importance Gaussian so that it still covers bumps `extent` away.
        const double rate = focus.rate / (1.0 + 0.25 * focus.rate * focus.extent * focus.extent);
        return qmc_gaussian_rule(focus.center, rate, opts.mc_points << level,
                                 opts.seed + static_cast<std::uint64_t>(level));
    }
    double cutoff = focus.extent + std::sqrt(kTailLog / focus.rate);
    cutoff = std::min(cutoff, focus.max_radius);
    const int panels = std::max(4, static_cast<int>(std::ceil(cutoff * cutoff * focus.rate / 6.0)));
    const double x = 2.0 * focus.rate * focus.extent * cutoff;
    int angular = std::max({32, 2 * focus.min_angular + 16,
                            16 + static_cast<int>(std::ceil(2.0 * std::sqrt(40.0 * x)))});
    angular = round_up(angular, 8);
    return polar_rule(focus.center[0], cutoff, panels << level, kGlOrder, angular << level);
}

} // namespace fock
