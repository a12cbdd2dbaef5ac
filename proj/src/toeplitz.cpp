#include "fock/toeplitz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>

#include <boost/math/special_functions/gamma.hpp>

#include "fock/csv.hpp"
#include "fock/errors.hpp"
#include "fock/norms.hpp"

namespace fock {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kBlock = 4096;
constexpr int kMaxOrder = 192;
constexpr std::size_t kGramTerms = 4000;

void require_plane(const FockParams& params, const char* what)
{
    if (params.n() != 1) {
        throw Unsupported(std::string(what) + " is implemented on C (n = 1) only");
    }
}

// v_k(w) = e_k(w) exp(-alpha |w|^2 / 2) for k < order.
void basis_damped(double alpha, cplx w, std::span<cplx> v)
{
    v[0] = std::exp(-0.5 * alpha * std::norm(w));
    for (std::size_t k = 1; k < v.size(); ++k) {
        v[k] = v[k - 1] * w * std::sqrt(alpha / static_cast<double>(k));
    }
}

// log sqrt(alpha^k / k!).
double log_basis_norm(double alpha, int k) { return 0.5 * (k * std::log(alpha) - std::lgamma(k + 1.0)); }

// sum_i w_i conj(v(x_i)) v(x_i)^T over the nodes of a plane rule.
Eigen::MatrixXcd gram_of_rule(double alpha, const QuadratureScheme& rule, int order)
{
    const auto k = static_cast<Eigen::Index>(order);
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(k, k);
    const auto re = rule.re();
    const auto im = rule.im();
    const auto w = rule.weights();
    std::vector<cplx> v(static_cast<std::size_t>(order));
    for (std::size_t start = 0; start < rule.size(); start += kBlock) {
        const std::size_t len = std::min(kBlock, rule.size() - start);
        Eigen::MatrixXcd block(static_cast<Eigen::Index>(len), k);
        Eigen::VectorXd wts(static_cast<Eigen::Index>(len));
        for (std::size_t i = 0; i < len; ++i) {
            basis_damped(alpha, cplx(re[start + i], im[start + i]), v);
            for (Eigen::Index c = 0; c < k; ++c) {
                block(static_cast<Eigen::Index>(i), c) = v[static_cast<std::size_t>(c)];
            }
            wts(static_cast<Eigen::Index>(i)) = w[start + i];
        }
        acc.noalias() += block.adjoint() * (wts.asDiagonal() * block);
    }
    return acc;
}

// Leaves invariant under rotation about 0 have a diagonal matrix with moments
// M_kk = (alpha^k / k!) integral |z|^{2k} exp(-alpha |z|^2) dmu.
std::optional<Eigen::VectorXd> radial_diagonal(double a, const MeasureModel& leaf, int order)
{
    Eigen::VectorXd d(order);
    if (const auto* g = std::get_if<GaussianDensity>(&leaf.variant()); g && g->center.norm2() == 0.0) {
        const double ab = a + g->beta;
        for (int k = 0; k < order; ++k) {
            d(k) = g->scale * kPi * std::exp(k * std::log(a) - (k + 1) * std::log(ab));
        }
        return d;
    }
    if (const auto* r = std::get_if<RadialPolyGaussian>(&leaf.variant())) {
        const double ab = a + r->beta;
        for (int k = 0; k < order; ++k) {
            d(k) = r->scale * kPi *
                   std::exp(k * std::log(a) - std::lgamma(k + 1.0) + std::lgamma(k + r->m + 1.0) -
                            (k + r->m + 1) * std::log(ab));
        }
        return d;
    }
    if (const auto* b = std::get_if<BallIndicator>(&leaf.variant()); b && b->center.norm2() == 0.0) {
        for (int k = 0; k < order; ++k) {
            d(k) = b->scale * kPi / a * boost::math::gamma_p(k + 1.0, a * b->radius * b->radius);
        }
        return d;
    }
    return std::nullopt;
}

bool closed_form_leaf(const MeasureModel& leaf)
{
    return leaf.is_zero() || std::holds_alternative<Lebesgue>(leaf.variant()) ||
           std::holds_alternative<Atomic>(leaf.variant()) ||
           std::holds_alternative<GaussianDensity>(leaf.variant());
}

// Coefficients <f, e_k>, k < order.
Eigen::VectorXcd fock_coefficients(const FockParams& params, const EntireFn& f, int order)
{
    const double a = params.alpha();
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(order);
    if (const auto* m = f.as_monomial()) {
        for (std::size_t k = 0; k < m->coeffs.size() && static_cast<int>(k) < order; ++k) {
            out(static_cast<Eigen::Index>(k)) = m->coeffs[k] * std::exp(-log_basis_norm(a, static_cast<int>(k)));
        }
        return out;
    }
    const auto* kc = f.as_combo();
    std::vector<cplx> v(static_cast<std::size_t>(order));
    for (std::size_t j = 0; j < kc->weights.size(); ++j) {
        basis_damped(a, kc->centers[j][0], v);
        for (int k = 0; k < order; ++k) {
            out(k) += kc->weights[j] * std::conj(v[static_cast<std::size_t>(k)]);
        }
    }
    return out;
}

EntireFn monomial_from_fock(const FockParams& params, const Eigen::VectorXcd& g)
{
    // Trailing coordinates below 1e-17 of the largest carry no significant l^2 mass.
    const double cut = 1e-17 * g.cwiseAbs().maxCoeff();
    Eigen::Index len = g.size();
    while (len > 1 && std::abs(g(len - 1)) <= cut) {
        --len;
    }
    std::vector<cplx> coeffs(static_cast<std::size_t>(len));
    for (Eigen::Index k = 0; k < len; ++k) {
        coeffs[static_cast<std::size_t>(k)] = g(k) * std::exp(log_basis_norm(params.alpha(), static_cast<int>(k)));
    }
    return EntireFn::monomial(std::move(coeffs));
}

} // namespace

// ---------------------------------------------------------------------------------------

ToeplitzMatrix::ToeplitzMatrix(FockParams params, Eigen::MatrixXcd entries)
    : params_(params), m_(std::move(entries))
{
    if (m_.rows() != m_.cols()) {
        throw PreconditionError("Toeplitz matrix must be square");
    }
}

std::vector<double> ToeplitzMatrix::singular_values() const
{
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m_);
    const auto& s = svd.singularValues();
    return std::vector<double>(s.data(), s.data() + s.size());
}

double ToeplitzMatrix::trace() const { return m_.trace().real(); }

double ToeplitzMatrix::hermitian_defect() const { return (m_ - m_.adjoint()).cwiseAbs().maxCoeff(); }

double ToeplitzMatrix::min_eigenvalue() const
{
    const Eigen::MatrixXcd h = 0.5 * (m_ + m_.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

ToeplitzMatrix matrix(const FockParams& params, const MeasureModel& mu, int order, const QuadratureOptions& opts)
{
    require_plane(params, "the Toeplitz matrix");
    require_dim(params, mu);
    if (order < 1) {
        throw PreconditionError("matrix order must be at least 1");
    }
    const double a = params.alpha();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(order, order);
    for (const auto* leaf : mu.leaves()) {
        if (leaf->is_zero()) {
            continue;
        }
        if (const auto* l = std::get_if<Lebesgue>(&leaf->variant())) {
            // T_{dV} = (pi / alpha) Id by the reproducing property.
            m.diagonal().array() += l->scale * kPi / a;
            continue;
        }
        if (const auto d = radial_diagonal(a, *leaf, order)) {
            m.diagonal() += d->cast<cplx>();
            continue;
        }
        Focus hint;
        hint.center = CPoint::zero(1);
        hint.rate = 0.0;
        hint.min_angular = order;
        if (std::holds_alternative<Atomic>(leaf->variant())) {
            m += gram_of_rule(a, measure_rule(params, *leaf, hint, 0, opts), order);
            continue;
        }
        Eigen::MatrixXcd prev = gram_of_rule(a, measure_rule(params, *leaf, hint, 0, opts), order);
        bool done = false;
        double gap = 0.0;
        for (int level = 1; level <= opts.max_refinements; ++level) {
            Eigen::MatrixXcd cur = gram_of_rule(a, measure_rule(params, *leaf, hint, level, opts), order);
            gap = (cur - prev).cwiseAbs().maxCoeff();
            const double scale = cur.cwiseAbs().maxCoeff();
            prev = std::move(cur);
            if (gap <= opts.rel_tol * scale + opts.abs_tol) {
                done = true;
                break;
            }
        }
        if (!done) {
            throw ConvergenceError("matrix: quadrature did not converge (last refinement gap " +
                                   std::to_string(gap) + ")");
        }
        m += prev;
    }
    // Assembled as a sum of w conj(v) v^T, hence Hermitian; symmetrize rounding.
    m = 0.5 * (m + m.adjoint()).eval();
    return ToeplitzMatrix(params, std::move(m));
}

int image_order(const FockParams& params, const MeasureModel& mu, double reach)
{
    const Focus f = measure_focus(params, mu);
    double r = reach;
    if (f.rate > 0.0) {
        r = std::max(r, f.center.norm() + f.extent + (std::isinf(f.rate) ? 0.0 : std::sqrt(kTailLog / f.rate)));
    }
    const double a = params.alpha();
    const int k = static_cast<int>(std::ceil(a * r * r + 8.0 * std::sqrt(a) * r + 32.0));
    return std::min(kMaxOrder, (k + 7) / 8 * 8);
}

EntireFn image(const FockParams& params, const MeasureModel& mu, const EntireFn& f, const QuadratureOptions& opts)
{
    return image(params, mu, f, nullptr, opts);
}

EntireFn image(const FockParams& params, const MeasureModel& mu, const EntireFn& f, const ToeplitzMatrix* cached,
               const QuadratureOptions& opts)
{
    require_dim(params, mu);
    if (f.dim() != params.n()) {
        throw DimensionMismatch("image: function dimension differs from n");
    }
    const int n = params.n();
    const double a = params.alpha();
    if (mu.is_zero()) {
        return f.scaled(0.0);
    }
    const auto leaves = mu.leaves();
    const bool closed = std::all_of(leaves.begin(), leaves.end(), [](const MeasureModel* l) { return closed_form_leaf(*l); });

    if (closed && f.is_monomial()) {
        const bool only_lebesgue = std::all_of(leaves.begin(), leaves.end(), [](const MeasureModel* l) {
            return l->is_zero() || std::holds_alternative<Lebesgue>(l->variant());
        });
        if (only_lebesgue) {
            double s = 0.0;
            for (const auto* l : leaves) {
                if (const auto* leb = std::get_if<Lebesgue>(&l->variant())) {
                    s += leb->scale;
                }
            }
            return f.scaled(s * std::pow(kPi / a, n));
        }
    }

    if (closed && !f.is_monomial()) {
        const auto* kc = f.as_combo();
        std::vector<cplx> weights;
        std::vector<CPoint> centers;
        for (const auto* leaf : leaves) {
            if (leaf->is_zero()) {
                continue;
            }
            if (const auto* l = std::get_if<Lebesgue>(&leaf->variant())) {
                const double s = l->scale * std::pow(kPi / a, n);
                for (std::size_t j = 0; j < kc->weights.size(); ++j) {
                    weights.push_back(s * kc->weights[j]);
                    centers.push_back(kc->centers[j]);
                }
            } else if (const auto* at = std::get_if<Atomic>(&leaf->variant())) {
                // T k = sum_i m_i f(b_i) exp(-alpha|b_i|^2) K_{b_i} = sum_i m_i [f e^{-alpha|.|^2/2}](b_i) k_{b_i}.
                for (const auto& atom : at->atoms) {
                    if (atom.weight <= 0.0) {
                        continue;
                    }
                    weights.push_back(atom.weight * eval_damped(params, f, atom.point));
                    centers.push_back(atom.point);
                }
            } else {
                const auto& g = std::get<GaussianDensity>(leaf->variant());
                const double b = g.beta;
                const double ab = a + b;
                const double log_pref = std::log(g.scale) + n * std::log(kPi / ab);
                for (std::size_t j = 0; j < kc->weights.size(); ++j) {
                    const CPoint& w = kc->centers[j];
                    // T k_w = C K_u with u = (alpha w + beta c) / (alpha + beta).
                    const CPoint u = (w * a + g.center * b) * (1.0 / ab);
                    const cplx log_c = log_pref + (a * b * inner(g.center, w) + b * b * g.center.norm2()) / ab -
                                       b * g.center.norm2() - 0.5 * a * w.norm2();
                    weights.push_back(kc->weights[j] * std::exp(log_c + 0.5 * a * u.norm2()));
                    centers.push_back(u);
                }
            }
        }
        return EntireFn::combo(std::move(weights), std::move(centers));
    }

    require_plane(params, "the Toeplitz image through the matrix");
    int order = image_order(params, mu, f.bump_radius(a));
    if (const auto* m = f.as_monomial()) {
        order = std::max(order, static_cast<int>(m->coeffs.size()) + 8);
    }
    ToeplitzMatrix local(params, Eigen::MatrixXcd());
    if (cached == nullptr || cached->order() < order) {
        local = matrix(params, mu, order, opts);
        cached = &local;
    }
    const int k = cached->order();
    const Eigen::VectorXcd fc = fock_coefficients(params, f, k);
    const Eigen::VectorXcd g = cached->entries() * fc;
    return monomial_from_fock(params, g);
}

SpectralNorm hilbert_norm(const FockParams& params, const MeasureModel& mu, int order, const QuadratureOptions& opts)
{
    const auto m = matrix(params, mu, order, opts);
    SpectralNorm res;
    res.order = order;
    res.value = m.singular_values().front();
    const int half = std::max(1, order / 2);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m.entries().topLeftCorner(half, half));
    res.delta = std::abs(res.value - svd.singularValues()(0));
    return res;
}

TraceResult trace(const FockParams& params, const MeasureModel& mu, int order, const QuadratureOptions& opts)
{
    TraceResult res;
    res.value = matrix(params, mu, order, opts).trace();
    res.diverges = std::isinf(total_mass(params, mu));
    return res;
}

double fock_norm(const FockParams& params, const EntireFn& g, double p, const QuadratureOptions& opts)
{
    if (const auto* kc = g.as_combo()) {
        if (kc->weights.size() == 1) {
            // ||k_w||_{(p,alpha)} = 1 for every p.
            return std::abs(kc->weights.front());
        }
        if (p == 2.0 && kc->weights.size() <= kGramTerms) {
            double s = 0.0;
            const std::size_t m = kc->weights.size();
            for (std::size_t i = 0; i < m; ++i) {
                s += std::norm(kc->weights[i]);
                for (std::size_t j = i + 1; j < m; ++j) {
                    // <k_{b_i}, k_{b_j}> = k_{b_i}(b_j) exp(-alpha |b_j|^2 / 2).
                    const cplx gij = damped_normalized_kernel(params, kc->centers[i], kc->centers[j]);
                    s += 2.0 * std::real(kc->weights[i] * std::conj(kc->weights[j]) * gij);
                }
            }
            return std::sqrt(std::max(s, 0.0));
        }
    }
    if (std::isinf(p)) {
        return norm_inf(params, g).value;
    }
    return norm_p(params, g, p, opts);
}

NormEstimate op_norm_estimate(const FockParams& params, const MeasureModel& mu, double p, double q,
                              const std::vector<EntireFn>& tests, const QuadratureOptions& opts,
                              const std::vector<double>* test_norms)
{
    if (test_norms && test_norms->size() != tests.size()) {
        throw PreconditionError("op_norm_estimate needs one precomputed norm per test");
    }
    if (tests.empty()) {
        throw PreconditionError("op_norm_estimate needs at least one test function");
    }
    if (!(p >= 1.0) || !(q >= 1.0)) {
        throw PreconditionError("exponents must lie in [1, infinity]");
    }
    require_dim(params, mu);
    NormEstimate est;
    est.ratios.assign(tests.size(), 0.0);

    const auto leaves = mu.leaves();
    const bool closed = std::all_of(leaves.begin(), leaves.end(), [](const MeasureModel* l) { return closed_form_leaf(*l); });
    std::optional<ToeplitzMatrix> cached;
    if (!closed && !mu.is_zero()) {
        double reach = 0.0;
        int degree = 0;
        for (const auto& t : tests) {
            reach = std::max(reach, t.bump_radius(params.alpha()));
            if (const auto* m = t.as_monomial()) {
                degree = std::max(degree, static_cast<int>(m->coeffs.size()));
            }
        }
        cached = matrix(params, mu, std::max(image_order(params, mu, reach), degree + 8), opts);
    }

    for (std::size_t i = 0; i < tests.size(); ++i) {
        const double np = test_norms ? (*test_norms)[i] : fock_norm(params, tests[i], p, opts);
        if (!(np > 0.0)) {
            throw PreconditionError("test function " + std::to_string(i) + " has zero norm");
        }
        if (mu.is_zero()) {
            continue;
        }
        const EntireFn g = image(params, mu, tests[i], cached ? &*cached : nullptr, opts);
        est.ratios[i] = fock_norm(params, g, q, opts) / np;
        if (est.witness < 0 || est.ratios[i] > est.lower_bound) {
            est.lower_bound = est.ratios[i];
            est.witness = static_cast<int>(i);
        }
    }
    if (est.witness < 0) {
        est.witness = 0;
    }
    return est;
}

EntireFn lattice_test_function(const FockParams& params, const Lattice& lat)
{
    if (lat.n != params.n()) {
        throw DimensionMismatch("lattice dimension differs from n");
    }
    std::vector<cplx> w;
    std::vector<CPoint> c;
    for (const auto& z : lat.points) {
        if (z.norm() <= lat.bound_radius - lat.r + 1e-12) {
            w.emplace_back(1.0);
            c.push_back(z);
        }
    }
    if (w.empty()) {
        throw PreconditionError("no lattice point within bound_radius - r");
    }
    return EntireFn::combo(std::move(w), std::move(c));
}

std::vector<EntireFn> default_tests(const FockParams& params, const Lattice& lat, const std::vector<double>& radii,
                                    int angles)
{
    std::vector<EntireFn> out;
    const int n = params.n();
    for (double r : radii) {
        const int count = r == 0.0 ? 1 : std::max(1, angles);
        for (int l = 0; l < count; ++l) {
            std::vector<cplx> c(static_cast<std::size_t>(n));
            c[0] = std::polar(r, 2.0 * kPi * l / count);
            out.push_back(EntireFn::kernel_at(CPoint(std::move(c))));
        }
    }
    out.push_back(lattice_test_function(params, lat));
    return out;
}

double berezin_from_operator(const FockParams& params, const MeasureModel& mu, const CPoint& z,
                             const QuadratureOptions& opts)
{
    require_dim(params, mu);
    if (z.dim() != params.n()) {
        throw DimensionMismatch("berezin_from_operator point dimension differs from n");
    }
    if (mu.is_zero()) {
        return 0.0;
    }
    const double a = params.alpha();
    const EntireFn kz = EntireFn::kernel_at(z);
    const EntireFn g = image(params, mu, kz, opts);
    Focus focus;
    focus.center = CPoint::zero(params.n());
    focus.extent = std::max(z.norm(), g.bump_radius(a));
    focus.rate = 0.5 * a;
    if (const auto* m = g.as_monomial()) {
        focus.min_angular = static_cast<int>(m->coeffs.size());
    }
    const double pref = std::pow(a / kPi, params.n());
    const cplx v = converge<cplx>(params.n(), opts, "berezin_from_operator", [&](int level) {
        const auto rule = focus_rule(focus, level, opts);
        std::vector<cplx> gv(rule.size()), kv(rule.size());
        eval_damped_batch(params, g, params.n(), rule.re(), rule.im(), gv);
        eval_damped_batch(params, kz, params.n(), rule.re(), rule.im(), kv);
        const auto w = rule.weights();
        cplx s{};
        for (std::size_t i = 0; i < rule.size(); ++i) {
            s += w[i] * gv[i] * std::conj(kv[i]);
        }
        return pref * s;
    });
    return v.real();
}

cplx apply(const FockParams& params, const MeasureModel& mu, const EntireFn& f, const CPoint& z,
           const QuadratureOptions& opts)
{
    require_dim(params, mu);
    if (f.dim() != params.n() || z.dim() != params.n()) {
        throw DimensionMismatch("apply: function, point and parameters differ in dimension");
    }
    if (mu.is_zero()) {
        return {};
    }
    const double a = params.alpha();
    Focus hint = function_focus(params, f, 1.0);
    hint.extent = std::max(hint.extent, z.norm());
    // The kernel factor oscillates with frequency alpha |z| across the rule.
    const double cutoff = hint.extent + std::sqrt(kTailLog / hint.rate);
    hint.min_angular += static_cast<int>(std::ceil(a * z.norm() * cutoff));
    // Where T_mu f vanishes the sum cancels down to rounding of the absolute integral, so
    // that (times a small multiple of epsilon) joins the absolute tolerance.
    auto eval = [&](int level, double& abs_sum) {
        const auto rule = measure_rule(params, mu, hint, level, opts);
        std::vector<cplx> fv(rule.size());
        eval_damped_batch(params, f, params.n(), rule.re(), rule.im(), fv);
        const auto w = rule.weights();
        cplx s{};
        abs_sum = 0.0;
        for (std::size_t i = 0; i < rule.size(); ++i) {
            // K_w(z) f(w) exp(-alpha|w|^2) = k_w(z) [f exp(-alpha|.|^2/2)](w).
            const cplx term = w[i] * normalized_kernel(params, rule.node(i), z) * fv[i];
            s += term;
            abs_sum += std::abs(term);
        }
        return s;
    };
    const double tol = params.n() == 1 ? opts.rel_tol : opts.mc_rel_tol;
    double abs_sum = 0.0;
    cplx prev = eval(0, abs_sum);
    double gap = 0.0;
    for (int level = 1; level <= opts.max_refinements; ++level) {
        const cplx cur = eval(level, abs_sum);
        gap = std::abs(cur - prev);
        if (!std::isfinite(gap)) {
            break;
        }
        const double floor = 1e3 * std::numeric_limits<double>::epsilon() * abs_sum;
        if (gap <= tol * std::abs(cur) + opts.abs_tol + floor) {
            return cur;
        }
        prev = cur;
    }
    throw ConvergenceError("apply: quadrature did not converge (last refinement gap " + std::to_string(gap) + ")");
}

void write_matrix_csv(const ToeplitzMatrix& m, std::ostream& out)
{
    out << "j,k,re,im\n";
    for (int j = 0; j < m.order(); ++j) {
        for (int k = 0; k < m.order(); ++k) {
            out << j << ',' << k << ',' << fmt(m(j, k).real()) << ',' << fmt(m(j, k).imag()) << '\n';
        }
    }
}

void write_spectrum_csv(const std::vector<double>& sv, std::ostream& out)
{
    out << "index,singular_value\n";
    for (std::size_t i = 0; i < sv.size(); ++i) {
        out << i << ',' << fmt(sv[i]) << '\n';
    }
}

} // namespace fock
