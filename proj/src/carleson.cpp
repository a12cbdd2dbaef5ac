#include "fock/carleson.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <random>

#include "fock/errors.hpp"
#include "fock/lattice.hpp"

namespace fock {

namespace {

constexpr double kPi = std::numbers::pi;

void check_exponent(double p, const char* what)
{
    if (!(p >= 1.0)) {
        throw PreconditionError(std::string(what) + " exponent must lie in [1, infinity]");
    }
}

std::string exponent_text(double p)
{
    return std::isinf(p) ? "inf" : std::to_string(p);
}

// Directions on the unit sphere of C^n used to sample circles |z| = R.
std::vector<CPoint> sphere_directions(int n, double radius)
{
    std::vector<CPoint> dirs;
    if (n == 1) {
        const int m = std::max(64, static_cast<int>(std::ceil(2.0 * kPi * radius / 0.05)));
        dirs.reserve(static_cast<std::size_t>(m));
        for (int k = 0; k < m; ++k) {
            const double th = 2.0 * kPi * k / m;
            dirs.push_back(CPoint{std::polar(1.0, th)});
        }
        return dirs;
    }
    for (int j = 0; j < n; ++j) {
        for (const cplx u : {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)}) {
            std::vector<cplx> c(static_cast<std::size_t>(n), 0.0);
            c[static_cast<std::size_t>(j)] = u;
            dirs.emplace_back(std::move(c));
        }
    }
    std::mt19937_64 rng(0x5eedULL + static_cast<unsigned>(n));
    std::normal_distribution<double> g;
    for (int k = 0; k < 256; ++k) {
        std::vector<cplx> c(static_cast<std::size_t>(n));
        double s = 0.0;
        for (auto& v : c) {
            v = cplx(g(rng), g(rng));
            s += std::norm(v);
        }
        for (auto& v : c) {
            v /= std::sqrt(s);
        }
        dirs.emplace_back(std::move(c));
    }
    return dirs;
}

bool radially_symmetric(const MeasureModel& mu)
{
    for (const auto* leaf : mu.leaves()) {
        const auto& v = leaf->variant();
        if (std::holds_alternative<Lebesgue>(v) || std::holds_alternative<RadialPolyGaussian>(v)) {
            continue;
        }
        if (const auto* g = std::get_if<GaussianDensity>(&v); g && g->center.norm2() == 0.0) {
            continue;
        }
        if (const auto* b = std::get_if<BallIndicator>(&v); b && b->center.norm2() == 0.0) {
            continue;
        }
        if (leaf->is_zero()) {
            continue;
        }
        return false;
    }
    return true;
}

double circle_sup(const FockParams& params, const MeasureModel& mu, double t, double radius,
                  bool symmetric, const QuadratureOptions& opts)
{
    const int n = params.n();
    if (radius == 0.0 || symmetric) {
        std::vector<cplx> c(static_cast<std::size_t>(n), 0.0);
        c[0] = radius;
        return berezin(params, mu, t, CPoint(std::move(c)), opts);
    }
    double best = 0.0;
    for (const auto& d : sphere_directions(n, radius)) {
        best = std::max(best, berezin(params, mu, t, d * radius, opts));
    }
    return best;
}

Lattice settings_lattice(const FockParams& params, const CarlesonSettings& s)
{
    return build_lattice(params, s.r, s.bound_radius);
}

void fill_ratios(ClassificationReport& rep)
{
    for (auto a = rep.quantities.begin(); a != rep.quantities.end(); ++a) {
        for (auto b = std::next(a); b != rep.quantities.end(); ++b) {
            const double x = a->second;
            const double y = b->second;
            if (std::isfinite(x) && std::isfinite(y) && x > 0.0 && y > 0.0) {
                rep.equivalence_ratios[a->first + "/" + b->first] = x / y;
            }
        }
    }
}

} // namespace

std::string_view criterion_name(Criterion c)
{
    switch (c) {
    case Criterion::berezin_sup: return "berezin_sup";
    case Criterion::berezin_l1: return "berezin_l1";
    case Criterion::avg_fn: return "avg_fn";
    case Criterion::avg_seq: return "avg_seq";
    case Criterion::finite_mass: return "finite_mass";
    case Criterion::seq_lpq: return "seq_lpq";
    }
    return "unknown";
}

std::vector<double> default_vanishing_radii(const FockParams& params, const MeasureModel& mu, double t)
{
    const Focus f = measure_focus(params, mu);
    const double gamma = 0.5 * t * params.alpha();
    double top = 12.0;
    if (f.rate > 0.0) {
        const double eff = std::isinf(f.rate) ? gamma : f.rate * gamma / (f.rate + gamma);
        top = f.extent + std::sqrt(std::log(1e8) / eff);
    }
    std::vector<double> radii(8);
    for (int k = 0; k < 8; ++k) {
        radii[static_cast<std::size_t>(k)] = top * (k + 1) / 8.0;
    }
    return radii;
}

VanishingResult vanishing_check(const FockParams& params, const MeasureModel& mu, double t,
                                const std::vector<double>& radii, double decay_epsilon,
                                const QuadratureOptions& opts)
{
    require_dim(params, mu);
    if (radii.size() < 4) {
        throw PreconditionError("vanishing check needs at least 4 radii");
    }
    for (std::size_t k = 0; k < radii.size(); ++k) {
        if (!(radii[k] >= 0.0) || (k > 0 && !(radii[k] > radii[k - 1]))) {
            throw PreconditionError("vanishing radii must be nonnegative and increasing");
        }
    }
    VanishingResult res;
    res.radii = radii;
    if (mu.is_zero()) {
        res.profile.assign(radii.size(), 0.0);
        return res;
    }
    const bool symmetric = radially_symmetric(mu);
    double peak = 0.0;
    for (const double r : radii) {
        res.profile.push_back(circle_sup(params, mu, t, r, symmetric, opts));
        peak = std::max(peak, res.profile.back());
    }
    const std::size_t m = res.profile.size();
    const bool small = res.profile[m - 1] < decay_epsilon * peak;
    const bool decreasing = res.profile[m - 1] < res.profile[m - 2] && res.profile[m - 2] < res.profile[m - 3];
    res.decays = peak == 0.0 || (small && decreasing);
    return res;
}

NormEstimate embedding_norm_estimate(const FockParams& params, const MeasureModel& mu, double p, double q,
                                     const std::vector<EntireFn>& tests, const QuadratureOptions& opts,
                                     const std::vector<double>* test_norms)
{
    check_exponent(p, "source");
    check_exponent(q, "target");
    if (tests.empty()) {
        throw PreconditionError("embedding estimate needs at least one test function");
    }
    if (test_norms && test_norms->size() != tests.size()) {
        throw PreconditionError("embedding estimate needs one precomputed norm per test");
    }
    NormEstimate est;
    for (std::size_t i = 0; i < tests.size(); ++i) {
        const double denom = test_norms ? (*test_norms)[i] : fock_norm(params, tests[i], p, opts);
        if (!(denom > 0.0)) {
            throw PreconditionError("embedding estimate got a test function of zero norm");
        }
        const double r = sigma_integral(params, mu, tests[i], q, opts) / denom;
        est.ratios.push_back(r);
        if (est.witness < 0 || r > est.lower_bound) {
            est.lower_bound = r;
            est.witness = static_cast<int>(i);
        }
    }
    return est;
}

CarlesonDecision is_carleson(const FockParams& params, const MeasureModel& mu, double p, double q,
                             const CarlesonSettings& s)
{
    require_dim(params, mu);
    check_exponent(p, "source");
    check_exponent(q, "target");
    CarlesonDecision d;
    d.p = p;
    d.q = q;
    if (std::isinf(p)) {
        if (std::isinf(q)) {
            throw Unsupported("no named (inf, inf) Carleson class; use the sup-Berezin, averaging-function "
                              "and averaging-sequence criteria directly");
        }
        d.criterion = Criterion::finite_mass;
        const double mass = total_mass(params, mu);
        d.is_carleson = std::isfinite(mass);
        d.is_vanishing = d.is_carleson;
        d.proxy_norm = mass;
        return d;
    }
    if (q == 1.0 && p > 1.0) {
        d.criterion = Criterion::seq_lpq;
        const double s_exp = p / (p - 1.0);
        const auto seq = averaging_sequence(params, mu, settings_lattice(params, s), s.r, {s_exp}, s.quad);
        d.is_carleson = !seq.infinite_tail;
        d.is_vanishing = d.is_carleson;
        d.proxy_norm = seq.infinite_tail ? kInf : seq.ls.at(s_exp);
        return d;
    }
    if (std::isinf(q) || q < p) {
        throw Unsupported("no criterion for (" + exponent_text(p) + ", " + exponent_text(q) +
                          ") Carleson measures: finite exponents with q < p (other than q = 1) and "
                          "finite p with q = inf are not implemented");
    }
    d.criterion = Criterion::berezin_sup;
    const auto sup = berezin_norm(params, mu, s.t, NormMode::sup, s.grid, s.quad);
    d.is_carleson = sup.finite;
    d.proxy_norm = sup.value;
    const auto radii = s.radii.empty() ? default_vanishing_radii(params, mu, s.t) : s.radii;
    d.evidence = vanishing_check(params, mu, s.t, radii, s.decay_epsilon, s.quad);
    d.is_vanishing = d.is_carleson && d.evidence.decays;
    return d;
}

ClassificationReport classify_toeplitz(const FockParams& params, const MeasureModel& mu, double p, double q,
                                       const CarlesonSettings& s)
{
    require_dim(params, mu);
    check_exponent(p, "source");
    check_exponent(q, "target");
    ClassificationReport rep;
    rep.p = p;
    rep.q = q;

    // Embedding that carries the norm equivalence of each case.
    double emb_p = 1.0;
    double emb_q = 1.0;

    if (std::isinf(p) && !std::isinf(q)) {
        rep.regime = "infinity_to_finite";
        const auto d = is_carleson(params, mu, kInf, q, s);
        rep.criterion = d.criterion;
        rep.bounded = d.is_carleson;
        rep.compact = d.is_carleson;
        const double mass = d.proxy_norm;
        rep.norm_proxy = std::pow(mass, 1.0 / q);
        rep.quantities["total_mass"] = mass;
        rep.quantities["berezin_l1"] = berezin_norm(params, mu, s.t, NormMode::l1, s.grid, s.quad).value;
        const auto seq = averaging_sequence(params, mu, settings_lattice(params, s), s.r, {}, s.quad);
        rep.quantities["avg_seq_l1"] = seq.infinite_tail ? kInf : seq.l1;
        emb_p = kInf;
        emb_q = q;
    } else if (!std::isinf(p) && (std::isinf(q) || p == 1.0)) {
        rep.regime = p == 1.0 ? "from_one" : "finite_to_infinity";
        // Bounded iff mu is (1, q') Carleson for finite q' >= p; every such q' shares the
        // sup-Berezin criterion.
        const double qq = std::isinf(q) ? std::max(p, 1.0) : std::max(p, q);
        const auto d = is_carleson(params, mu, 1.0, qq, s);
        rep.criterion = d.criterion;
        rep.bounded = d.is_carleson;
        rep.compact = d.is_vanishing;
        rep.evidence = d.evidence;
        rep.norm_proxy = d.proxy_norm;
        rep.quantities["berezin_sup"] = d.proxy_norm;
        rep.quantities["avg_fn_sup"] = averaging_function_sup(params, mu, s.delta, s.grid, s.quad).value;
        const auto seq = averaging_sequence(params, mu, settings_lattice(params, s), s.r, {}, s.quad);
        rep.quantities["avg_seq_linf"] = seq.linf;
        emb_p = 1.0;
        emb_q = std::isinf(q) ? 1.0 : q;
    } else if (q == 1.0 && p > 1.0) {
        rep.regime = "to_one";
        const auto d = is_carleson(params, mu, p, 1.0, s);
        rep.criterion = d.criterion;
        rep.bounded = d.is_carleson;
        rep.compact = d.is_carleson;
        rep.norm_proxy = d.proxy_norm;
        rep.quantities["avg_seq_ls"] = d.proxy_norm;
        emb_p = p;
        emb_q = 1.0;
    } else {
        throw Unsupported("no boundedness criterion for T_mu: F^" + exponent_text(p) + " -> F^" +
                          exponent_text(q) + "; implemented: finite source to F^inf, F^inf to finite "
                          "target, source F^1, target F^1");
    }
    rep.quantities["proxy"] = rep.norm_proxy;

    if (s.estimate_norms) {
        const Lattice lat = settings_lattice(params, s);
        const auto tests = default_tests(params, lat, s.test_radii, s.test_angles);
        std::vector<double> norms_p;
        for (const auto& f : tests) {
            norms_p.push_back(fock_norm(params, f, p, s.quad));
        }
        rep.norm_lower_bound = op_norm_estimate(params, mu, p, q, tests, s.quad, &norms_p).lower_bound;
        const std::vector<double>* norms_emb = &norms_p;
        std::vector<double> other;
        if (emb_p != p) {
            for (const auto& f : tests) {
                other.push_back(fock_norm(params, f, emb_p, s.quad));
            }
            norms_emb = &other;
        }
        rep.embedding_lower_bound =
            embedding_norm_estimate(params, mu, emb_p, emb_q, tests, s.quad, norms_emb).lower_bound;
        rep.quantities["op_norm_lb"] = rep.norm_lower_bound;
        rep.quantities["embedding_lb"] = rep.embedding_lower_bound;
    }
    fill_ratios(rep);
    return rep;
}

EquivalenceTable equivalence_suite(const FockParams& params, const std::vector<MeasureModel>& family,
                                   const std::vector<std::string>& names, double p, double q,
                                   const CarlesonSettings& s)
{
    if (!names.empty() && names.size() != family.size()) {
        throw PreconditionError("equivalence suite needs one name per family member");
    }
    if (!(s.band >= 1.0)) {
        throw PreconditionError("band constant must be at least 1");
    }
    EquivalenceTable table;
    table.p = p;
    table.q = q;
    table.band = s.band;

    std::vector<std::future<ClassificationReport>> jobs;
    jobs.reserve(family.size());
    for (const auto& mu : family) {
        jobs.push_back(std::async(std::launch::async, [&, mu] { return classify_toeplitz(params, mu, p, q, s); }));
    }
    for (std::size_t i = 0; i < family.size(); ++i) {
        EquivalenceRow row;
        row.name = names.empty() ? family[i].describe() : names[i];
        const ClassificationReport rep = jobs[i].get();
        row.quantities = rep.quantities;
        row.ratios = rep.equivalence_ratios;
        if (!rep.bounded) {
            row.included = false;
            row.note = "unbounded under (" + exponent_text(p) + ", " + exponent_text(q) + "); excluded";
            table.rows.push_back(std::move(row));
            continue;
        }
        for (std::size_t a = 0; a < s.band_quantities.size(); ++a) {
            for (std::size_t b = a + 1; b < s.band_quantities.size(); ++b) {
                const auto& na = s.band_quantities[a];
                const auto& nb = s.band_quantities[b];
                const auto ia = rep.quantities.find(na);
                const auto ib = rep.quantities.find(nb);
                if (ia == rep.quantities.end() || ib == rep.quantities.end()) {
                    continue;
                }
                const std::string key = na < nb ? na + "/" + nb : nb + "/" + na;
                const double x = na < nb ? ia->second : ib->second;
                const double y = na < nb ? ib->second : ia->second;
                const double r = (x == 0.0 && y == 0.0) ? 1.0 : x / y;
                auto [it, fresh] = table.ratio_range.try_emplace(key, r, r);
                if (!fresh) {
                    it->second.first = std::min(it->second.first, r);
                    it->second.second = std::max(it->second.second, r);
                }
                if (!(r >= 1.0 / s.band && r <= s.band)) {
                    table.passes = false;
                }
            }
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace fock
