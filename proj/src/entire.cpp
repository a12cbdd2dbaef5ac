#include "fock/entire.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fock/errors.hpp"
#include "fock/simd.hpp"

namespace fock {

EntireFn EntireFn::monomial(std::vector<cplx> coeffs)
{
    if (coeffs.empty()) {
        throw PreconditionError("monomial expansion needs at least one coefficient");
    }
    return EntireFn(Monomial{std::move(coeffs)}, 1);
}

EntireFn EntireFn::combo(std::vector<cplx> weights, std::vector<CPoint> centers)
{
    if (weights.empty()) {
        throw PreconditionError("kernel combination needs at least one term");
    }
    if (weights.size() != centers.size()) {
        throw PreconditionError("kernel combination: weights and centers differ in length");
    }
    const int dim = centers.front().dim();
    for (const auto& c : centers) {
        if (c.dim() != dim) {
            throw DimensionMismatch("kernel combination centers differ in dimension");
        }
    }
    return EntireFn(KernelCombo{std::move(weights), std::move(centers)}, dim);
}

EntireFn EntireFn::kernel_at(const CPoint& w, cplx c) { return combo({c}, {w}); }

EntireFn EntireFn::constant(int n, cplx c) { return combo({c}, {CPoint::zero(n)}); }

std::size_t EntireFn::terms() const
{
    if (const auto* m = as_monomial()) {
        return m->coeffs.size();
    }
    return as_combo()->weights.size();
}

double EntireFn::bump_radius(double alpha) const
{
    if (const auto* m = as_monomial()) {
        return std::sqrt(static_cast<double>(m->coeffs.size() - 1) / alpha);
    }
    double r = 0.0;
    for (const auto& c : as_combo()->centers) {
        r = std::max(r, c.norm());
    }
    return r;
}

EntireFn EntireFn::scaled(cplx c) const
{
    if (const auto* m = as_monomial()) {
        Monomial out = *m;
        for (auto& a : out.coeffs) {
            a *= c;
        }
        return EntireFn(std::move(out), dim_);
    }
    KernelCombo out = *as_combo();
    for (auto& a : out.weights) {
        a *= c;
    }
    return EntireFn(std::move(out), dim_);
}

namespace {

void require_dim(const EntireFn& f, const CPoint& z)
{
    if (f.is_monomial() && z.dim() != 1) {
        throw DimensionMismatch("monomial expansions are defined on C only, got dimension " +
                                std::to_string(z.dim()));
    }
    if (z.dim() != f.dim()) {
        throw DimensionMismatch("point dimension " + std::to_string(z.dim()) +
                                " does not match function dimension " + std::to_string(f.dim()));
    }
}

// sum_k a_k z^k e^{-alpha|z|^2/2}, each term combined in log form. Used where the damping
// factor underflows.
cplx monomial_damped_log(double alpha, const Monomial& m, cplx z)
{
    const double r2 = std::norm(z);
    if (r2 == 0.0) {
        return m.coeffs.front();
    }
    const double log_r = 0.5 * std::log(r2);
    const double theta = std::arg(z);
    const double base = -0.5 * alpha * r2;
    cplx s{};
    for (std::size_t k = 0; k < m.coeffs.size(); ++k) {
        if (m.coeffs[k] == cplx{}) {
            continue;
        }
        const double kk = static_cast<double>(k);
        s += m.coeffs[k] * std::polar(std::exp(kk * log_r + base), kk * theta);
    }
    return s;
}

// The monomial in the orthonormal basis: coefficients g_k = a_k sqrt(k! / alpha^k) and
// recursion steps sqrt(alpha / k), so that the damped basis values
// v_k = v_{k-1} z sqrt(alpha / k), v_0 = exp(-alpha |z|^2 / 2), stay bounded by 1.
struct OrthoMonomial {
    std::vector<cplx> g;
    std::vector<double> step;
    bool finite = true;

    OrthoMonomial(double alpha, const Monomial& m) : g(m.coeffs.size()), step(m.coeffs.size())
    {
        double scale = 1.0;
        for (std::size_t k = 0; k < m.coeffs.size(); ++k) {
            if (k > 0) {
                step[k] = std::sqrt(alpha / static_cast<double>(k));
                scale /= step[k];
            }
            g[k] = m.coeffs[k] * scale;
            finite = finite && std::isfinite(std::abs(g[k]));
        }
    }
};

// Damping exponents beyond this go through the log form.
constexpr double kDampLimit = 700.0;

cplx ortho_damped(double alpha, const OrthoMonomial& om, const Monomial& m, cplx z)
{
    const double e = 0.5 * alpha * std::norm(z);
    if (e > kDampLimit || !om.finite) {
        return monomial_damped_log(alpha, m, z);
    }
    cplx v = std::exp(-e);
    cplx s = om.g[0] * v;
    for (std::size_t k = 1; k < om.g.size(); ++k) {
        v *= z * om.step[k];
        s += om.g[k] * v;
    }
    return s;
}

cplx monomial_damped(double alpha, const Monomial& m, cplx z)
{
    return ortho_damped(alpha, OrthoMonomial(alpha, m), m, z);
}

struct PackedCombo {
    std::vector<double> cre, cim, wre, wim;

    explicit PackedCombo(const KernelCombo& kc)
    {
        const std::size_t n = kc.weights.size();
        cre.resize(n);
        cim.resize(n);
        wre.resize(n);
        wim.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            cre[j] = kc.weights[j].real();
            cim[j] = kc.weights[j].imag();
            wre[j] = kc.centers[j][0].real();
            wim[j] = kc.centers[j][0].imag();
        }
    }

    simd::ComboView view() const { return {cre, cim, wre, wim}; }
};

} // namespace

cplx eval_entire(const FockParams& params, const EntireFn& f, const CPoint& z)
{
    require_dim(f, z);
    if (const auto* m = f.as_monomial()) {
        cplx s{};
        for (auto it = m->coeffs.rbegin(); it != m->coeffs.rend(); ++it) {
            s = s * z[0] + *it;
        }
        return s;
    }
    const auto* kc = f.as_combo();
    cplx s{};
    for (std::size_t j = 0; j < kc->weights.size(); ++j) {
        s += kc->weights[j] * normalized_kernel(params, kc->centers[j], z);
    }
    return s;
}

cplx eval_damped(const FockParams& params, const EntireFn& f, const CPoint& z)
{
    require_dim(f, z);
    if (const auto* m = f.as_monomial()) {
        return monomial_damped(params.alpha(), *m, z[0]);
    }
    const auto* kc = f.as_combo();
    cplx s{};
    for (std::size_t j = 0; j < kc->weights.size(); ++j) {
        s += kc->weights[j] * damped_normalized_kernel(params, kc->centers[j], z);
    }
    return s;
}

void eval_damped_plane(const FockParams& params, const EntireFn& f, std::span<const double> re,
                       std::span<const double> im, std::span<cplx> out)
{
    if (f.dim() != 1) {
        throw DimensionMismatch("eval_damped_plane requires a function on C");
    }
    if (const auto* m = f.as_monomial()) {
        const OrthoMonomial om(params.alpha(), *m);
        for (std::size_t i = 0; i < re.size(); ++i) {
            out[i] = ortho_damped(params.alpha(), om, *m, cplx(re[i], im[i]));
        }
        return;
    }
    const PackedCombo packed(*f.as_combo());
    const auto view = packed.view();
    for (std::size_t i = 0; i < re.size(); ++i) {
        out[i] = simd::combo_damped(view, params.alpha(), re[i], im[i]);
    }
}

void eval_damped_batch(const FockParams& params, const EntireFn& f, int dim,
                       std::span<const double> re, std::span<const double> im,
                       std::span<cplx> out)
{
    if (dim == 1) {
        eval_damped_plane(params, f, re, im, out);
        return;
    }
    const auto d = static_cast<std::size_t>(dim);
    std::vector<cplx> coords(d);
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            coords[j] = cplx(re[i * d + j], im[i * d + j]);
        }
        out[i] = eval_damped(params, f, CPoint(coords));
    }
}

} // namespace fock
