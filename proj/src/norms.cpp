#include "fock/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "fock/errors.hpp"

namespace fock {

namespace {

void check_p(double p)
{
    if (!(p >= 1.0) || !std::isfinite(p)) {
        throw PreconditionError("norm_p needs a finite exponent p >= 1");
    }
}

// Upper bound of |f(z)| exp(-alpha |z|^2 / 2) that depends on |z| or on the distances to
// the kernel centers only.
double envelope(const FockParams& params, const EntireFn& f, const CPoint& z)
{
    const double a = params.alpha();
    if (const auto* m = f.as_monomial()) {
        const double r = z.norm();
        double s = 0.0;
        double rk = 1.0;
        for (const auto& c : m->coeffs) {
            s += std::abs(c) * rk;
            rk *= r;
        }
        return s * std::exp(-0.5 * a * r * r);
    }
    const auto* kc = f.as_combo();
    double s = 0.0;
    for (std::size_t j = 0; j < kc->weights.size(); ++j) {
        s += std::abs(kc->weights[j]) * std::exp(-0.5 * a * dist2(z, kc->centers[j]));
    }
    return s;
}

double abs_weight_sum(const EntireFn& f)
{
    double s = 0.0;
    if (const auto* m = f.as_monomial()) {
        for (const auto& c : m->coeffs) {
            s += std::abs(c);
        }
        return s;
    }
    for (const auto& c : f.as_combo()->weights) {
        s += std::abs(c);
    }
    return s;
}

// Compass search for a local maximum of g starting at z.
template <class G>
std::pair<CPoint, double> compass_max(const G& g, CPoint z, double step, double min_step)
{
    double best = g(z);
    const int n = z.dim();
    while (step > min_step) {
        bool moved = false;
        for (int j = 0; j < n && !moved; ++j) {
            for (const cplx dir : {cplx(1, 0), cplx(-1, 0), cplx(0, 1), cplx(0, -1)}) {
                std::vector<cplx> c(z.coords().begin(), z.coords().end());
                c[static_cast<std::size_t>(j)] += step * dir;
                CPoint cand(std::move(c));
                const double v = g(cand);
                if (v > best) {
                    best = v;
                    z = std::move(cand);
                    moved = true;
                    break;
                }
            }
        }
        if (!moved) {
            step *= 0.5;
        }
    }
    return {z, best};
}

constexpr double kMaxGridPoints = 4.0e7;

} // namespace

double norm_p(const FockParams& params, const EntireFn& f, double p,
              const QuadratureScheme& scheme)
{
    check_p(p);
    if (scheme.dim() != f.dim() || f.dim() != params.n()) {
        throw DimensionMismatch("norm_p: scheme, function and parameters differ in dimension");
    }
    std::vector<cplx> vals(scheme.size());
    eval_damped_batch(params, f, scheme.dim(), scheme.re(), scheme.im(), vals);
    const auto w = scheme.weights();
    double s = 0.0;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        s += w[i] * std::pow(std::abs(vals[i]), p);
    }
    const double pref = std::pow(params.alpha() * p / (2.0 * std::numbers::pi), params.n());
    return std::pow(pref * s, 1.0 / p);
}

QuadratureScheme norm_rule(const FockParams& params, const EntireFn& f, double p, int level,
                           const QuadratureOptions& opts)
{
    Focus focus;
    focus.center = CPoint::zero(params.n());
    focus.extent = f.bump_radius(params.alpha());
    focus.rate = 0.5 * params.alpha() * p;
    if (const auto* m = f.as_monomial()) {
        focus.min_angular =
            static_cast<int>(std::ceil(static_cast<double>(m->coeffs.size() - 1) * p));
    }
    return focus_rule(focus, level, opts);
}

double norm_p(const FockParams& params, const EntireFn& f, double p,
              const QuadratureOptions& opts)
{
    check_p(p);
    return converge<double>(params.n(), opts, "norm_p", [&](int level) {
        return norm_p(params, f, p, norm_rule(params, f, p, level, opts));
    });
}

double envelope_radius(const FockParams& params, const EntireFn& f, double level)
{
    const double a = params.alpha();
    const double total = abs_weight_sum(f);
    if (total == 0.0) {
        return 0.0;
    }
    if (!(level > 0.0)) {
        throw PreconditionError("envelope level must be positive");
    }
    const double r0 = f.bump_radius(a);
    if (f.as_combo() != nullptr) {
        // sum |c_j| exp(-alpha d^2/2) <= total exp(-alpha (|z| - r0)^2 / 2).
        const double ratio = total / level;
        return r0 + (ratio > 1.0 ? std::sqrt(2.0 * std::log(ratio) / a) : 0.0);
    }
    // Every term r^k exp(-alpha r^2/2) decreases past sqrt(k/alpha) <= r0.
    double r = std::max(r0, 1e-3);
    double step = 0.25 / std::sqrt(a);
    while (envelope(params, f, CPoint{cplx(r, 0)}) >= level) {
        r += step;
        step *= 1.1;
        if (r > 1e6) {
            throw PreconditionError("norm_inf: no decay certificate for this function");
        }
    }
    return r;
}

SupResult norm_inf(const FockParams& params, const EntireFn& f, const SupGrid& grid)
{
    if (!(grid.spacing > 0.0)) {
        throw PreconditionError("sup grid spacing must be positive");
    }
    if (f.dim() != params.n()) {
        throw DimensionMismatch("norm_inf: function and parameters differ in dimension");
    }
    const double a = params.alpha();
    auto g = [&](const CPoint& z) { return std::abs(eval_damped(params, f, z)); };

    // Starting guesses: bump locations.
    std::vector<CPoint> starts;
    if (const auto* kc = f.as_combo()) {
        starts = kc->centers;
    } else {
        const double r0 = f.bump_radius(a);
        for (int l = 0; l < 16; ++l) {
            starts.push_back(CPoint{std::polar(r0, 2.0 * std::numbers::pi * l / 16.0)});
        }
    }
    starts.push_back(CPoint::zero(params.n()));

    SupResult res;
    res.resolution = grid.spacing;
    res.argmax = starts.back();
    for (const auto& s : starts) {
        const double v = g(s);
        if (v > res.value) {
            res.value = v;
            res.argmax = s;
        }
    }

    if (params.n() == 1) {
        double radius = grid.radius;
        if (radius <= 0.0) {
            const double floor = res.value > 0.0 ? res.value : abs_weight_sum(f);
            radius = envelope_radius(params, f, grid.certificate * floor);
            radius = std::max(radius, grid.spacing);
        }
        const auto half = static_cast<long>(std::ceil(radius / grid.spacing));
        const double side = 2.0 * static_cast<double>(half) + 1.0;
        if (side * side > kMaxGridPoints) {
            throw PreconditionError("norm_inf: certified grid exceeds the point budget");
        }
        res.radius = static_cast<double>(half) * grid.spacing;
        const auto cols = static_cast<std::size_t>(side);
        std::vector<double> re(cols), im(cols);
        std::vector<cplx> out(cols);
        for (std::size_t c = 0; c < cols; ++c) {
            re[c] = (static_cast<double>(c) - static_cast<double>(half)) * grid.spacing;
        }
        for (long row = -half; row <= half; ++row) {
            std::fill(im.begin(), im.end(), static_cast<double>(row) * grid.spacing);
            eval_damped_plane(params, f, re, im, out);
            for (std::size_t c = 0; c < cols; ++c) {
                const double v = std::abs(out[c]);
                if (v > res.value) {
                    res.value = v;
                    res.argmax = CPoint{cplx(re[c], im[c])};
                }
            }
        }
        if (grid.refine) {
            auto [z, v] = compass_max(g, res.argmax, grid.spacing, 1e-9);
            if (v > res.value) {
                res.value = v;
                res.argmax = z;
            }
        }
        return res;
    }

    // C^n: multi-start pattern search from every bump and the origin.
    res.radius = envelope_radius(params, f, grid.certificate * std::max(res.value, 1e-300));
    for (const auto& s : starts) {
        auto [z, v] = compass_max(g, s, 0.25 / std::sqrt(a), 1e-9);
        if (v > res.value) {
            res.value = v;
            res.argmax = z;
        }
    }
    return res;
}

cplx reproducing_residual(const FockParams& params, const EntireFn& f, const CPoint& z,
                          const QuadratureOptions& opts)
{
    if (f.dim() != params.n() || z.dim() != params.n()) {
        throw DimensionMismatch("reproducing residual: function, point and parameters differ in dimension");
    }
    const double a = params.alpha();
    const EntireFn kz = EntireFn::kernel_at(z);
    Focus focus;
    focus.center = CPoint::zero(params.n());
    focus.extent = std::max(z.norm(), f.bump_radius(a));
    focus.rate = 0.5 * a;
    const double cutoff = focus.extent + std::sqrt(kTailLog / focus.rate);
    focus.min_angular = static_cast<int>(std::ceil(a * (z.norm() + f.bump_radius(a)) * cutoff));
    if (const auto* m = f.as_monomial()) {
        focus.min_angular += static_cast<int>(m->coeffs.size());
    }
    const double pref = std::pow(a / std::numbers::pi, params.n());
    // (alpha/pi)^n integral of f conj(K_z) exp(-alpha|eta|^2), damped by exp(-alpha|z|^2/2) on both sides.
    const cplx v = converge<cplx>(params.n(), opts, "reproducing identity", [&](int level) {
        const auto rule = focus_rule(focus, level, opts);
        std::vector<cplx> fv(rule.size()), kv(rule.size());
        eval_damped_batch(params, f, params.n(), rule.re(), rule.im(), fv);
        eval_damped_batch(params, kz, params.n(), rule.re(), rule.im(), kv);
        const auto w = rule.weights();
        cplx s{};
        for (std::size_t i = 0; i < rule.size(); ++i) {
            s += w[i] * fv[i] * std::conj(kv[i]);
        }
        return pref * s;
    });
    return v - eval_damped(params, f, z);
}

} // namespace fock
