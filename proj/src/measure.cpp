#include "fock/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

#include <boost/math/special_functions/laguerre.hpp>
#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "fock/csv.hpp"
#include "fock/errors.hpp"
#include "fock/norms.hpp"
#include "fock/simd.hpp"

namespace fock {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kGl = 16;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_scale(double s)
{
    if (!(s >= 0.0) || !std::isfinite(s)) {
        throw PreconditionError("measure scale must be finite and nonnegative");
    }
}

double factorial(int n) { return std::tgamma(n + 1.0); }

// Volume of the ball of radius rho in C^n = R^{2n}.
double ball_volume(int n, double rho) { return std::pow(kPi, n) * std::pow(rho, 2 * n) / factorial(n); }

// P(X <= x) for a noncentral chi-square with k degrees of freedom and noncentrality lambda.
double ncx2_cdf(int k, double lambda, double x)
{
    if (x <= 0.0) {
        return 0.0;
    }
    if (lambda <= 0.0) {
        return boost::math::gamma_p(0.5 * k, 0.5 * x);
    }
    const boost::math::non_central_chi_squared_distribution<double> dist(k, lambda);
    return boost::math::cdf(dist, x);
}

double ncx2_ccdf(int k, double lambda, double x)
{
    if (x <= 0.0) {
        return 1.0;
    }
    if (lambda <= 0.0) {
        return boost::math::gamma_q(0.5 * k, 0.5 * x);
    }
    const boost::math::non_central_chi_squared_distribution<double> dist(k, lambda);
    return boost::math::cdf(boost::math::complement(dist, x));
}

// Volume of the cap of height h in [0, 2R] of a ball of radius R in R^d.
double cap_volume(int d, double radius, double h)
{
    const double full = std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d + 1.0) * std::pow(radius, d);
    if (h <= 0.0) {
        return 0.0;
    }
    if (h >= 2.0 * radius) {
        return full;
    }
    if (h > radius) {
        return full - cap_volume(d, radius, 2.0 * radius - h);
    }
    const double x = (2.0 * radius * h - h * h) / (radius * radius);
    return 0.5 * full * boost::math::ibeta(0.5 * (d + 1), 0.5, x);
}

// Volume of D(a, r1) intersected with D(b, r2), centers at distance dist, in C^n.
double ball_intersection(int n, double r1, double r2, double dist)
{
    if (dist >= r1 + r2) {
        return 0.0;
    }
    if (dist <= std::abs(r1 - r2)) {
        return ball_volume(n, std::min(r1, r2));
    }
    if (n == 1) {
        // Two-circle lens.
        const double a1 = std::acos(std::clamp((dist * dist + r1 * r1 - r2 * r2) / (2 * dist * r1), -1.0, 1.0));
        const double a2 = std::acos(std::clamp((dist * dist + r2 * r2 - r1 * r1) / (2 * dist * r2), -1.0, 1.0));
        const double k = (-dist + r1 + r2) * (dist + r1 - r2) * (dist - r1 + r2) * (dist + r1 + r2);
        return r1 * r1 * a1 + r2 * r2 * a2 - 0.5 * std::sqrt(std::max(k, 0.0));
    }
    const double d1 = (dist * dist + r1 * r1 - r2 * r2) / (2 * dist);
    return cap_volume(2 * n, r1, r1 - d1) + cap_volume(2 * n, r2, r2 - (dist - d1));
}

int round_up8(int v) { return (v + 7) / 8 * 8; }

int angular_nodes(double x, int min_angular)
{
    return round_up8(std::max({32, 2 * min_angular + 16,
                               16 + static_cast<int>(std::ceil(2.0 * std::sqrt(40.0 * std::max(x, 0.0))))}));
}

// Polar rule on D(center, rho) able to resolve a Gaussian bump of the given rate whose
// peak set lies within `reach` of center.
QuadratureScheme disc_rule(cplx center, double rho, double rate, double reach, int min_angular,
                           int level)
{
    const int panels = std::max(4, static_cast<int>(std::ceil(rho * rho * rate / 6.0)));
    const int angular = angular_nodes(2.0 * rate * reach * rho, min_angular);
    return polar_rule(center, rho, panels << level, kGl, angular << level);
}

struct LeafFocus {
    CPoint center;
    double extent = 0.0;
    double rate = 0.0;
    int min_angular = 0;
};

double reach_of(double extent, double rate)
{
    if (rate == 0.0) {
        return kInf;
    }
    return extent + (std::isinf(rate) ? 0.0 : std::sqrt(kTailLog / rate));
}

Focus combine(const Focus& h, const LeafFocus& d)
{
    if (h.rate == 0.0) {
        Focus f;
        f.center = d.center;
        f.extent = d.extent;
        f.rate = d.rate;
        f.min_angular = std::max(h.min_angular, d.min_angular);
        return f;
    }
    const double a = h.rate;
    const double b = d.rate;
    const CPoint p = (h.center * a + d.center * b) * (1.0 / (a + b));
    Focus f;
    f.center = p;
    f.extent = std::max(h.extent + std::sqrt(dist2(h.center, p)),
                        d.extent + std::sqrt(dist2(d.center, p)));
    f.rate = a + b;
    f.min_angular = std::max(h.min_angular, d.min_angular);
    return f;
}

QuadratureScheme empty_scheme(int n) { return QuadratureScheme(n, {}, {}, {}, 0, 0.0); }

void require_plane(const FockParams& params, const char* what)
{
    if (params.n() != 1) {
        throw Unsupported(std::string(what) + " is implemented on C (n = 1) only");
    }
}

double positive_atoms_sum(const Atomic& a)
{
    double s = 0.0;
    for (const auto& at : a.atoms) {
        s += at.weight;
    }
    return s;
}

} // namespace

// ---------------------------------------------------------------------------------------
// Construction

MeasureModel MeasureModel::gaussian(double beta, CPoint center, double scale)
{
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw PreconditionError("gaussian beta must be positive");
    }
    if (center.dim() < 1) {
        throw PreconditionError("gaussian center must be a point");
    }
    check_scale(scale);
    return MeasureModel(GaussianDensity{beta, std::move(center), scale});
}

MeasureModel MeasureModel::lebesgue(double scale)
{
    check_scale(scale);
    return MeasureModel(Lebesgue{scale});
}

MeasureModel MeasureModel::ball(CPoint center, double radius, double scale)
{
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw PreconditionError("ball radius must be positive");
    }
    if (center.dim() < 1) {
        throw PreconditionError("ball center must be a point");
    }
    check_scale(scale);
    return MeasureModel(BallIndicator{std::move(center), radius, scale});
}

MeasureModel MeasureModel::radial_poly(int m, double beta, double scale)
{
    if (m < 0) {
        throw PreconditionError("radial_poly exponent m must be nonnegative");
    }
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw PreconditionError("radial_poly beta must be positive");
    }
    check_scale(scale);
    return MeasureModel(RadialPolyGaussian{m, beta, scale});
}

MeasureModel MeasureModel::atomic(std::vector<Atom> atoms)
{
    int dim = 0;
    for (const auto& a : atoms) {
        if (!(a.weight >= 0.0) || !std::isfinite(a.weight)) {
            throw PreconditionError("atom weights must be finite and nonnegative");
        }
        if (a.point.dim() < 1) {
            throw PreconditionError("atom location must be a point");
        }
        if (dim != 0 && a.point.dim() != dim) {
            throw DimensionMismatch("atoms live in different dimensions");
        }
        dim = a.point.dim();
    }
    return MeasureModel(Atomic{std::move(atoms)});
}

MeasureModel MeasureModel::mixture(std::vector<MeasureModel> components)
{
    int dim = 0;
    for (const auto& c : components) {
        const int d = c.dim();
        if (d != 0 && dim != 0 && d != dim) {
            throw DimensionMismatch("mixture components live in different dimensions");
        }
        if (d != 0) {
            dim = d;
        }
    }
    return MeasureModel(Mixture{std::move(components)});
}

MeasureModel MeasureModel::zero() { return MeasureModel(Atomic{}); }

int MeasureModel::dim() const
{
    return std::visit(Overloaded{
                          [](const GaussianDensity& g) { return g.center.dim(); },
                          [](const Lebesgue&) { return 0; },
                          [](const BallIndicator& b) { return b.center.dim(); },
                          [](const RadialPolyGaussian&) { return 0; },
                          [](const Atomic& a) { return a.atoms.empty() ? 0 : a.atoms.front().point.dim(); },
                          [](const Mixture& m) {
                              for (const auto& c : m.components) {
                                  if (c.dim() != 0) {
                                      return c.dim();
                                  }
                              }
                              return 0;
                          },
                      },
                      v_);
}

bool MeasureModel::is_zero() const
{
    return std::visit(Overloaded{
                          [](const GaussianDensity& g) { return g.scale == 0.0; },
                          [](const Lebesgue& l) { return l.scale == 0.0; },
                          [](const BallIndicator& b) { return b.scale == 0.0; },
                          [](const RadialPolyGaussian& r) { return r.scale == 0.0; },
                          [](const Atomic& a) { return positive_atoms_sum(a) == 0.0; },
                          [](const Mixture& m) {
                              return std::all_of(m.components.begin(), m.components.end(),
                                                 [](const MeasureModel& c) { return c.is_zero(); });
                          },
                      },
                      v_);
}

MeasureModel MeasureModel::scaled(double c) const
{
    check_scale(c);
    return std::visit(Overloaded{
                          [c](GaussianDensity g) { g.scale *= c; return MeasureModel(std::move(g)); },
                          [c](Lebesgue l) { l.scale *= c; return MeasureModel(l); },
                          [c](BallIndicator b) { b.scale *= c; return MeasureModel(std::move(b)); },
                          [c](RadialPolyGaussian r) { r.scale *= c; return MeasureModel(r); },
                          [c](Atomic a) {
                              for (auto& at : a.atoms) {
                                  at.weight *= c;
                              }
                              return MeasureModel(std::move(a));
                          },
                          [c](const Mixture& m) {
                              Mixture out;
                              for (const auto& comp : m.components) {
                                  out.components.push_back(comp.scaled(c));
                              }
                              return MeasureModel(std::move(out));
                          },
                      },
                      v_);
}

namespace {

std::string point_text(const CPoint& z)
{
    std::string s = "(";
    for (int j = 0; j < z.dim(); ++j) {
        if (j > 0) {
            s += ";";
        }
        s += fmt(z[j].real()) + "," + fmt(z[j].imag());
    }
    return s + ")";
}

} // namespace

std::string MeasureModel::describe() const
{
    return std::visit(
        Overloaded{
            [](const GaussianDensity& g) {
                return "gaussian(beta=" + fmt(g.beta) + ",center=" + point_text(g.center) +
                       ",scale=" + fmt(g.scale) + ")";
            },
            [](const Lebesgue& l) { return "lebesgue(scale=" + fmt(l.scale) + ")"; },
            [](const BallIndicator& b) {
                return "ball(center=" + point_text(b.center) + ",radius=" + fmt(b.radius) +
                       ",scale=" + fmt(b.scale) + ")";
            },
            [](const RadialPolyGaussian& r) {
                return "radial_poly(m=" + std::to_string(r.m) + ",beta=" + fmt(r.beta) +
                       ",scale=" + fmt(r.scale) + ")";
            },
            [](const Atomic& a) {
                std::string s = "atomic(";
                for (std::size_t i = 0; i < a.atoms.size(); ++i) {
                    s += (i ? ";" : "") + point_text(a.atoms[i].point) + ":" + fmt(a.atoms[i].weight);
                }
                return s + ")";
            },
            [](const Mixture& m) {
                std::string s = "mixture(";
                for (std::size_t i = 0; i < m.components.size(); ++i) {
                    s += (i ? "+" : "") + m.components[i].describe();
                }
                return s + ")";
            },
        },
        v_);
}

std::vector<const MeasureModel*> MeasureModel::leaves() const
{
    std::vector<const MeasureModel*> out;
    if (const auto* m = std::get_if<Mixture>(&v_)) {
        for (const auto& c : m->components) {
            auto sub = c.leaves();
            out.insert(out.end(), sub.begin(), sub.end());
        }
    } else {
        out.push_back(this);
    }
    return out;
}

void require_dim(const FockParams& params, const MeasureModel& mu)
{
    const int d = mu.dim();
    if (d != 0 && d != params.n()) {
        throw DimensionMismatch("measure lives on C^" + std::to_string(d) +
                                " but parameters fix n = " + std::to_string(params.n()));
    }
}

// ---------------------------------------------------------------------------------------
// Masses

namespace {

double leaf_total_mass(int n, const MeasureModel& leaf)
{
    return std::visit(
        Overloaded{
            [n](const GaussianDensity& g) { return g.scale * std::pow(kPi / g.beta, n); },
            [](const Lebesgue& l) { return l.scale == 0.0 ? 0.0 : kInf; },
            [n](const BallIndicator& b) { return b.scale * ball_volume(n, b.radius); },
            [n](const RadialPolyGaussian& r) {
                return r.scale * std::pow(kPi, n) * std::tgamma(r.m + n) /
                       (std::tgamma(n) * std::pow(r.beta, r.m + n));
            },
            [](const Atomic& a) { return positive_atoms_sum(a); },
            [](const Mixture&) { return 0.0; },
        },
        leaf.variant());
}

LeafFocus leaf_focus(int n, const MeasureModel& leaf)
{
    return std::visit(
        Overloaded{
            [](const GaussianDensity& g) { return LeafFocus{g.center, 0.0, g.beta, 0}; },
            [n](const Lebesgue&) { return LeafFocus{CPoint::zero(n), 0.0, 0.0, 0}; },
            [](const BallIndicator& b) { return LeafFocus{b.center, b.radius, kInf, 0}; },
            [n](const RadialPolyGaussian& r) {
                return LeafFocus{CPoint::zero(n), std::sqrt(r.m / r.beta), r.beta, 2 * r.m};
            },
            [n](const Atomic& a) {
                double e = 0.0;
                for (const auto& at : a.atoms) {
                    e = std::max(e, at.point.norm());
                }
                return LeafFocus{CPoint::zero(n), e, kInf, 0};
            },
            [n](const Mixture&) { return LeafFocus{CPoint::zero(n), 0.0, kInf, 0}; },
        },
        leaf.variant());
}

double leaf_tail_mass(int n, const MeasureModel& leaf, double radius)
{
    return std::visit(
        Overloaded{
            [&](const GaussianDensity& g) {
                return g.scale * std::pow(kPi / g.beta, n) *
                       ncx2_ccdf(2 * n, 2.0 * g.beta * g.center.norm2(), 2.0 * g.beta * radius * radius);
            },
            [](const Lebesgue& l) { return l.scale == 0.0 ? 0.0 : kInf; },
            [&](const BallIndicator& b) {
                const double inside = ball_intersection(n, b.radius, radius, b.center.norm());
                return std::max(0.0, b.scale * (ball_volume(n, b.radius) - inside));
            },
            [&](const RadialPolyGaussian& r) {
                return leaf_total_mass(n, leaf) * boost::math::gamma_q(r.m + n, r.beta * radius * radius);
            },
            [&](const Atomic& a) {
                double s = 0.0;
                for (const auto& at : a.atoms) {
                    s += at.point.norm() >= radius ? at.weight : 0.0;
                }
                return s;
            },
            [](const Mixture&) { return 0.0; },
        },
        leaf.variant());
}

// mu(D(z, rho)) for a density leaf on C by polar quadrature about z.
template <class Density>
double density_disc_mass(const CPoint& z, double rho, double rate, double reach, int min_angular,
                         const QuadratureOptions& opts, Density&& density)
{
    return converge<double>(1, opts, "ball_mass", [&](int level) {
        const auto rule = disc_rule(z[0], rho, rate, reach, min_angular, level);
        return density(rule);
    });
}

double leaf_ball_mass(const FockParams& params, const MeasureModel& leaf, const CPoint& z,
                      double rho, const QuadratureOptions& opts)
{
    const int n = params.n();
    return std::visit(
        Overloaded{
            [&](const GaussianDensity& g) {
                if (g.scale == 0.0) {
                    return 0.0;
                }
                if (n >= 2) {
                    return g.scale * std::pow(kPi / g.beta, n) *
                           ncx2_cdf(2 * n, 2.0 * g.beta * dist2(z, g.center), 2.0 * g.beta * rho * rho);
                }
                const double reach = std::sqrt(dist2(z, g.center));
                return density_disc_mass(z, rho, g.beta, reach, 0, opts, [&](const QuadratureScheme& r) {
                    return g.scale * simd::gauss_sum(r.re(), r.im(), r.weights(), g.center[0].real(),
                                                     g.center[0].imag(), g.beta);
                });
            },
            [&](const Lebesgue& l) { return l.scale * ball_volume(n, rho); },
            [&](const BallIndicator& b) {
                return b.scale * ball_intersection(n, b.radius, rho, std::sqrt(dist2(z, b.center)));
            },
            [&](const RadialPolyGaussian& r) {
                if (r.scale == 0.0) {
                    return 0.0;
                }
                if (n >= 2) {
                    throw Unsupported("ball_mass of radial_poly is implemented on C (n = 1) only");
                }
                const double reach = z.norm() + std::sqrt(r.m / r.beta);
                return density_disc_mass(z, rho, r.beta, reach, 2 * r.m, opts, [&](const QuadratureScheme& q) {
                    const auto re = q.re();
                    const auto im = q.im();
                    const auto w = q.weights();
                    double s = 0.0;
                    for (std::size_t i = 0; i < q.size(); ++i) {
                        const double u = re[i] * re[i] + im[i] * im[i];
                        s += w[i] * std::pow(u, r.m) * std::exp(-r.beta * u);
                    }
                    return r.scale * s;
                });
            },
            [&](const Atomic& a) {
                double s = 0.0;
                for (const auto& at : a.atoms) {
                    s += dist2(at.point, z) < rho * rho ? at.weight : 0.0;
                }
                return s;
            },
            [](const Mixture&) { return 0.0; },
        },
        leaf.variant());
}

} // namespace

double total_mass(const FockParams& params, const MeasureModel& mu)
{
    require_dim(params, mu);
    double s = 0.0;
    for (const auto* leaf : mu.leaves()) {
        s += leaf_total_mass(params.n(), *leaf);
    }
    return s;
}

double tail_mass(const FockParams& params, const MeasureModel& mu, double radius)
{
    require_dim(params, mu);
    if (radius <= 0.0) {
        return total_mass(params, mu);
    }
    double s = 0.0;
    for (const auto* leaf : mu.leaves()) {
        s += leaf_tail_mass(params.n(), *leaf, radius);
    }
    return s;
}

double ball_mass(const FockParams& params, const MeasureModel& mu, const CPoint& z, double radius,
                 const QuadratureOptions& opts)
{
    require_dim(params, mu);
    if (!(radius > 0.0)) {
        throw PreconditionError("ball_mass radius must be positive");
    }
    if (z.dim() != params.n()) {
        throw DimensionMismatch("ball_mass center dimension differs from n");
    }
    double s = 0.0;
    for (const auto* leaf : mu.leaves()) {
        s += leaf_ball_mass(params, *leaf, z, radius, opts);
    }
    return s;
}

SequenceNorms averaging_sequence(const FockParams& params, const MeasureModel& mu,
                                 const Lattice& lat, double radius,
                                 const std::vector<double>& exponents,
                                 const QuadratureOptions& opts)
{
    require_dim(params, mu);
    if (lat.n != params.n()) {
        throw DimensionMismatch("lattice dimension differs from n");
    }
    if (!(radius > 0.0)) {
        throw PreconditionError("averaging radius must be positive");
    }
    SequenceNorms out;
    out.values.reserve(lat.size());
    for (const auto& z : lat.points) {
        out.values.push_back(ball_mass(params, mu, z, radius, opts));
    }
    for (double v : out.values) {
        out.l1 += v;
        out.linf = std::max(out.linf, v);
    }
    // Balls about the omitted points lie in {|w| > bound - radius}; each point of that set
    // is covered by at most `overlap` of them.
    const double per_axis = std::floor(2.0 * radius / lat.spacing) + 1.0;
    const double overlap = std::pow(per_axis, 2 * lat.n);
    const double tail = tail_mass(params, mu, lat.bound_radius - radius);
    out.tail_bound = overlap * tail;
    out.infinite_tail = std::isinf(out.tail_bound);
    for (double s : exponents) {
        if (!(s >= 1.0)) {
            throw PreconditionError("sequence exponent must be at least 1");
        }
        double v = 0.0;
        if (std::isinf(s)) {
            v = out.linf;
        } else if (out.infinite_tail) {
            v = kInf;
        } else {
            double acc = 0.0;
            for (double x : out.values) {
                acc += std::pow(x, s);
            }
            v = std::pow(acc, 1.0 / s);
        }
        out.ls[s] = v;
    }
    if (out.infinite_tail) {
        out.l1 = kInf;
    }
    return out;
}

// ---------------------------------------------------------------------------------------
// Quadrature against mu

QuadratureScheme measure_rule(const FockParams& params, const MeasureModel& mu, const Focus& hint,
                              int level, const QuadratureOptions& opts)
{
    require_dim(params, mu);
    const int n = params.n();
    QuadratureScheme out = empty_scheme(n);
    for (const auto* leaf : mu.leaves()) {
        if (leaf->is_zero()) {
            continue;
        }
        std::visit(
            Overloaded{
                [&](const Atomic& a) {
                    const auto d = static_cast<std::size_t>(n);
                    std::vector<double> re, im, w;
                    for (const auto& at : a.atoms) {
                        if (at.weight <= 0.0) {
                            continue;
                        }
                        for (std::size_t j = 0; j < d; ++j) {
                            re.push_back(at.point[static_cast<int>(j)].real());
                            im.push_back(at.point[static_cast<int>(j)].imag());
                        }
                        w.push_back(at.weight);
                    }
                    out.append(QuadratureScheme(n, std::move(re), std::move(im), std::move(w), 0, 0.0));
                },
                [&](const Lebesgue& l) {
                    if (hint.rate == 0.0) {
                        throw PreconditionError("integrals against Lebesgue measure need a decaying integrand");
                    }
                    auto rule = focus_rule(hint, level, opts);
                    rule.scale_weights(l.scale);
                    out.append(rule);
                },
                [&](const GaussianDensity& g) {
                    const Focus f = combine(hint, LeafFocus{g.center, 0.0, g.beta, 0});
                    auto rule = focus_rule(f, level, opts);
                    rule.reweight([&](const CPoint& z) { return g.scale * std::exp(-g.beta * dist2(z, g.center)); });
                    out.append(rule);
                },
                [&](const RadialPolyGaussian& r) {
                    require_plane(params, "integration against radial_poly");
                    const Focus f = combine(hint, leaf_focus(n, *leaf));
                    auto rule = focus_rule(f, level, opts);
                    rule.reweight([&](const CPoint& z) {
                        const double u = z.norm2();
                        return r.scale * std::pow(u, r.m) * std::exp(-r.beta * u);
                    });
                    out.append(rule);
                },
                [&](const BallIndicator& b) {
                    require_plane(params, "integration against a ball indicator");
                    double reach = 0.0;
                    if (hint.rate > 0.0) {
                        reach = std::sqrt(dist2(hint.center, b.center)) + hint.extent;
                    }
                    auto rule = disc_rule(b.center[0], b.radius, hint.rate, reach, hint.min_angular, level);
                    rule.scale_weights(b.scale);
                    out.append(rule);
                },
                [](const Mixture&) {},
            },
            leaf->variant());
    }
    return out;
}

MeasureModel discretize(const FockParams& params, const MeasureModel& mu, const Focus& hint,
                        int level, const QuadratureOptions& opts)
{
    const auto rule = measure_rule(params, mu, hint, level, opts);
    std::vector<Atom> atoms;
    atoms.reserve(rule.size());
    const auto w = rule.weights();
    for (std::size_t i = 0; i < rule.size(); ++i) {
        if (w[i] > 0.0) {
            atoms.push_back({rule.node(i), w[i]});
        }
    }
    return MeasureModel::atomic(std::move(atoms));
}

Focus function_focus(const FockParams& params, const EntireFn& f, double q)
{
    Focus focus;
    focus.center = CPoint::zero(params.n());
    focus.extent = f.bump_radius(params.alpha());
    focus.rate = 0.5 * params.alpha() * q;
    if (const auto* m = f.as_monomial()) {
        focus.min_angular = static_cast<int>(std::ceil(static_cast<double>(m->coeffs.size() - 1) * q));
    }
    return focus;
}

Focus measure_focus(const FockParams& params, const MeasureModel& mu)
{
    require_dim(params, mu);
    Focus f;
    f.center = CPoint::zero(params.n());
    f.rate = kInf;
    for (const auto* leaf : mu.leaves()) {
        if (leaf->is_zero()) {
            continue;
        }
        const LeafFocus lf = leaf_focus(params.n(), *leaf);
        f.extent = std::max(f.extent, lf.center.norm() + lf.extent);
        f.rate = std::min(f.rate, lf.rate);
        f.min_angular = std::max(f.min_angular, lf.min_angular);
    }
    return f;
}

// ---------------------------------------------------------------------------------------
// Berezin transform

namespace {

double leaf_berezin(const FockParams& params, const MeasureModel& leaf, double t, const CPoint& w,
                    const QuadratureOptions& opts)
{
    const int n = params.n();
    const double gamma = 0.5 * t * params.alpha();
    return std::visit(
        Overloaded{
            [&](const Lebesgue& l) { return l.scale * std::pow(kPi / gamma, n); },
            [&](const Atomic& a) {
                double s = 0.0;
                for (const auto& at : a.atoms) {
                    s += at.weight * std::exp(-gamma * dist2(at.point, w));
                }
                return s;
            },
            [&](const GaussianDensity& g) {
                const double bg = g.beta + gamma;
                return g.scale * std::pow(kPi / bg, n) * std::exp(-g.beta * gamma / bg * dist2(g.center, w));
            },
            [&](const BallIndicator& b) {
                // Mass of the Gaussian exp(-gamma |. - w|^2) inside the ball.
                return b.scale * std::pow(kPi / gamma, n) *
                       ncx2_cdf(2 * n, 2.0 * gamma * dist2(b.center, w), 2.0 * gamma * b.radius * b.radius);
            },
            [&](const RadialPolyGaussian& r) {
                // |W|^{2m} moment of a complex Gaussian with mean gamma w / s and variance 1/s.
                const double s = r.beta + gamma;
                const double x = gamma * gamma * w.norm2() / s;
                const double moment = std::exp(std::lgamma(r.m + 1.0) - r.m * std::log(s)) *
                                      boost::math::laguerre(static_cast<unsigned>(r.m), static_cast<unsigned>(n - 1), -x);
                return r.scale * std::pow(kPi / s, n) * std::exp(-r.beta * gamma / s * w.norm2()) * moment;
            },
            [&](const auto&) {
                if (leaf.is_zero()) {
                    return 0.0;
                }
                Focus hint;
                hint.center = w;
                hint.rate = gamma;
                return converge<double>(n, opts, "berezin", [&](int level) {
                    const auto rule = measure_rule(params, leaf, hint, level, opts);
                    return simd::gauss_sum(rule.re(), rule.im(), rule.weights(), w[0].real(), w[0].imag(), gamma);
                });
            },
        },
        leaf.variant());
}

void check_t(double t)
{
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw PreconditionError("Berezin parameter t must be positive");
    }
}

} // namespace

double berezin(const FockParams& params, const MeasureModel& mu, double t, const CPoint& w,
               const QuadratureOptions& opts)
{
    require_dim(params, mu);
    check_t(t);
    if (w.dim() != params.n()) {
        throw DimensionMismatch("berezin point dimension differs from n");
    }
    double s = 0.0;
    for (const auto* leaf : mu.leaves()) {
        s += leaf_berezin(params, *leaf, t, w, opts);
    }
    return s;
}

double berezin_direct(const FockParams& params, const MeasureModel& mu, double t, const CPoint& w,
                      const QuadratureOptions& opts)
{
    require_dim(params, mu);
    check_t(t);
    if (mu.is_zero()) {
        return 0.0;
    }
    const double a = params.alpha();
    auto integrand = [&](const CPoint& z) {
        const double k = std::abs(normalized_kernel(params, w, z));
        return std::pow(k * std::exp(-0.5 * a * z.norm2()), t);
    };
    Focus hint;
    hint.center = w;
    hint.rate = 0.5 * t * a;
    return converge<double>(params.n(), opts, "berezin_direct", [&](int level) {
        const auto rule = measure_rule(params, mu, hint, level, opts);
        const auto wts = rule.weights();
        double s = 0.0;
        for (std::size_t i = 0; i < rule.size(); ++i) {
            s += wts[i] * integrand(rule.node(i));
        }
        return s;
    });
}

// ---------------------------------------------------------------------------------------
// Sup and L^1 functionals

namespace {

struct Split {
    double constant = 0.0;                      // Lebesgue part of the functional
    std::vector<const MeasureModel*> finite;    // everything else, zero leaves dropped
};

Split split_leaves(const MeasureModel& mu)
{
    Split s;
    for (const auto* leaf : mu.leaves()) {
        if (leaf->is_zero()) {
            continue;
        }
        if (std::holds_alternative<Lebesgue>(leaf->variant())) {
            continue;
        }
        s.finite.push_back(leaf);
    }
    return s;
}

double lebesgue_scale(const MeasureModel& mu)
{
    double s = 0.0;
    for (const auto* leaf : mu.leaves()) {
        if (const auto* l = std::get_if<Lebesgue>(&leaf->variant())) {
            s += l->scale;
        }
    }
    return s;
}

// Center about which a single leaf's functionals are radial, if any.
std::optional<CPoint> radial_center(int n, const MeasureModel& leaf)
{
    return std::visit(
        Overloaded{
            [](const GaussianDensity& g) -> std::optional<CPoint> { return g.center; },
            [](const BallIndicator& b) -> std::optional<CPoint> { return b.center; },
            [n](const RadialPolyGaussian&) -> std::optional<CPoint> { return CPoint::zero(n); },
            [](const Atomic& a) -> std::optional<CPoint> {
                std::optional<CPoint> c;
                for (const auto& at : a.atoms) {
                    if (at.weight <= 0.0) {
                        continue;
                    }
                    if (c) {
                        return std::nullopt;
                    }
                    c = at.point;
                }
                return c;
            },
            [](const auto&) -> std::optional<CPoint> { return std::nullopt; },
        },
        leaf.variant());
}

CPoint along_ray(const CPoint& c, double r)
{
    std::vector<cplx> v(c.coords().begin(), c.coords().end());
    v[0] += r;
    return CPoint(std::move(v));
}

template <class G>
double golden_max(const G& g, double lo, double hi, double& arg)
{
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo;
    double b = hi;
    double x1 = b - phi * (b - a);
    double x2 = a + phi * (b - a);
    double f1 = g(x1);
    double f2 = g(x2);
    while (b - a > 1e-9) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = g(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = g(x1);
        }
    }
    arg = f1 > f2 ? x1 : x2;
    return std::max(f1, f2);
}

// Maximizes value(z) over C^n for a finite measure whose functional is negligible beyond
// `reach` (measured from the origin, or from the radial center).
template <class Value>
FunctionalNorm sup_search(const FockParams& params, const std::vector<const MeasureModel*>& finite,
                          const Value& value, double tail_reach, const ProfileGrid& grid)
{
    const int n = params.n();
    FunctionalNorm res;
    res.argmax = CPoint::zero(n);
    if (finite.empty()) {
        return res;
    }
    const double h = grid.spacing;
    if (!(h > 0.0)) {
        throw PreconditionError("profile grid spacing must be positive");
    }
    auto take = [&](const CPoint& z, double v) {
        if (v > res.value) {
            res.value = v;
            res.argmax = z;
        }
    };

    if (finite.size() == 1) {
        if (auto c = radial_center(n, *finite.front())) {
            const LeafFocus lf = leaf_focus(n, *finite.front());
            double reach = grid.radius > 0.0 ? grid.radius
                                             : std::sqrt(dist2(lf.center, *c)) + reach_of(lf.extent, lf.rate) + tail_reach;
            res.radius = reach;
            auto g = [&](double r) { return value(along_ray(*c, r)); };
            double best_r = 0.0;
            double best = g(0.0);
            const auto steps = static_cast<long>(std::ceil(reach / h));
            for (long i = 1; i <= steps; ++i) {
                const double r = static_cast<double>(i) * h;
                const double v = g(r);
                if (v > best) {
                    best = v;
                    best_r = r;
                }
            }
            double arg = best_r;
            const double refined = golden_max(g, std::max(0.0, best_r - h), best_r + h, arg);
            if (refined > best) {
                best = refined;
                best_r = arg;
            }
            take(along_ray(*c, best_r), best);
            return res;
        }
    }

    // Candidates: every leaf's own focus.
    std::vector<CPoint> starts{CPoint::zero(n)};
    double reach = 0.0;
    for (const auto* leaf : finite) {
        const LeafFocus lf = leaf_focus(n, *leaf);
        reach = std::max(reach, lf.center.norm() + reach_of(lf.extent, lf.rate));
        if (const auto* a = std::get_if<Atomic>(&leaf->variant())) {
            for (const auto& at : a->atoms) {
                if (at.weight > 0.0) {
                    starts.push_back(at.point);
                }
            }
        } else {
            starts.push_back(lf.center);
        }
    }
    reach = grid.radius > 0.0 ? grid.radius : reach + tail_reach;
    res.radius = reach;
    for (const auto& s : starts) {
        take(s, value(s));
    }

    auto compass = [&](CPoint z, double step) {
        double best = value(z);
        while (step > 1e-8) {
            bool moved = false;
            for (int j = 0; j < n && !moved; ++j) {
                for (const cplx dir : {cplx(1, 0), cplx(-1, 0), cplx(0, 1), cplx(0, -1)}) {
                    std::vector<cplx> c(z.coords().begin(), z.coords().end());
                    c[static_cast<std::size_t>(j)] += step * dir;
                    CPoint cand(std::move(c));
                    const double v = value(cand);
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
        take(z, best);
    };

    if (n == 1) {
        const auto m = static_cast<long>(std::ceil(reach / h));
        for (long i = -m; i <= m; ++i) {
            for (long j = -m; j <= m; ++j) {
                const cplx z(static_cast<double>(i) * h, static_cast<double>(j) * h);
                if (std::abs(z) <= reach + h) {
                    const CPoint p{z};
                    take(p, value(p));
                }
            }
        }
        compass(res.argmax, h);
        return res;
    }
    res.lower_bound_only = true;
    for (const auto& s : starts) {
        compass(s, 0.25);
    }
    return res;
}

// Integral over C^n of a function radial about a point: (pi^n / Gamma(n)) int g(sqrt u) u^{n-1} du.
template <class G>
double radial_integral(int n, double extent, double rate, const QuadratureOptions& opts, const G& g)
{
    const double cut = extent + std::sqrt(kTailLog / rate);
    const double umax = cut * cut;
    const auto [gx, gw] = gauss_legendre(kGl);
    const double pref = std::pow(kPi, n) / std::tgamma(n);
    return converge<double>(1, opts, "radial integral", [&](int level) {
        const int panels = std::max(4, static_cast<int>(std::ceil(umax * rate / 6.0))) << level;
        const double hu = umax / panels;
        double s = 0.0;
        for (int p = 0; p < panels; ++p) {
            for (std::size_t k = 0; k < gx.size(); ++k) {
                const double u = hu * p + 0.5 * hu * (gx[k] + 1.0);
                s += 0.5 * hu * gw[k] * g(std::sqrt(u)) * std::pow(u, n - 1);
            }
        }
        return pref * s;
    });
}

} // namespace

FunctionalNorm berezin_norm(const FockParams& params, const MeasureModel& mu, double t, NormMode mode,
                            const ProfileGrid& grid, const QuadratureOptions& opts)
{
    require_dim(params, mu);
    check_t(t);
    const int n = params.n();
    const double gamma = 0.5 * t * params.alpha();
    const Split parts = split_leaves(mu);
    const double leb = lebesgue_scale(mu);
    FunctionalNorm res;
    res.argmax = CPoint::zero(n);

    if (mode == NormMode::l1) {
        if (leb > 0.0) {
            res.value = kInf;
            res.finite = false;
            return res;
        }
        for (const auto* leaf : parts.finite) {
            const auto c = radial_center(n, *leaf);
            if (c) {
                const LeafFocus lf = leaf_focus(n, *leaf);
                const double extent = std::sqrt(dist2(lf.center, *c)) + lf.extent;
                const double rate = std::isinf(lf.rate) ? gamma : lf.rate * gamma / (lf.rate + gamma);
                res.radius = std::max(res.radius, c->norm() + extent + std::sqrt(kTailLog / rate));
                res.value += radial_integral(n, extent, rate, opts, [&](double r) {
                    return leaf_berezin(params, *leaf, t, along_ray(*c, r), opts);
                });
            } else {
                // Several atoms: each is radial about itself.
                for (const auto& at : std::get<Atomic>(leaf->variant()).atoms) {
                    if (at.weight <= 0.0) {
                        continue;
                    }
                    res.value += radial_integral(n, 0.0, gamma, opts, [&](double r) {
                        return at.weight * std::exp(-gamma * r * r);
                    });
                }
            }
        }
        return res;
    }

    const double constant = leb * std::pow(kPi / gamma, n);
    res = sup_search(
        params, parts.finite,
        [&](const CPoint& z) {
            double s = 0.0;
            for (const auto* leaf : parts.finite) {
                s += leaf_berezin(params, *leaf, t, z, opts);
            }
            return s;
        },
        std::sqrt(kTailLog / gamma), grid);
    res.value += constant;
    return res;
}

FunctionalNorm averaging_function_sup(const FockParams& params, const MeasureModel& mu, double delta,
                                      const ProfileGrid& grid, const QuadratureOptions& opts)
{
    require_dim(params, mu);
    if (!(delta > 0.0)) {
        throw PreconditionError("averaging radius must be positive");
    }
    const Split parts = split_leaves(mu);
    const double constant = lebesgue_scale(mu) * ball_volume(params.n(), delta);
    FunctionalNorm res = sup_search(
        params, parts.finite,
        [&](const CPoint& z) {
            double s = 0.0;
            for (const auto* leaf : parts.finite) {
                s += leaf_ball_mass(params, *leaf, z, delta, opts);
            }
            return s;
        },
        delta, grid);
    res.value += constant;
    return res;
}

BerezinProfile berezin_profile(const FockParams& params, const MeasureModel& mu, double t,
                               const std::vector<CPoint>& points, const QuadratureOptions& opts)
{
    BerezinProfile prof;
    prof.t = t;
    prof.samples.reserve(points.size());
    for (const auto& z : points) {
        prof.samples.emplace_back(z, berezin(params, mu, t, z, opts));
    }
    prof.sup_estimate = berezin_norm(params, mu, t, NormMode::sup, {}, opts).value;
    for (const auto& s : prof.samples) {
        prof.sup_estimate = std::max(prof.sup_estimate, s.second);
    }
    prof.l1_estimate = berezin_norm(params, mu, t, NormMode::l1, {}, opts).value;
    return prof;
}

AdmissibilityReport admissibility(const FockParams& params, const MeasureModel& mu,
                                  const std::vector<CPoint>& samples, const QuadratureOptions& opts)
{
    AdmissibilityReport rep;
    rep.values.reserve(samples.size());
    for (const auto& z : samples) {
        double v = kInf;
        try {
            // |K_w(z)|^2 exp(-alpha|w|^2) = exp(alpha|z|^2) exp(-alpha|z - w|^2).
            v = std::exp(params.alpha() * z.norm2()) * berezin(params, mu, 2.0, z, opts);
        } catch (const ConvergenceError&) {
            rep.finite = false;
        }
        rep.finite = rep.finite && std::isfinite(v);
        rep.values.push_back(v);
    }
    return rep;
}

// ---------------------------------------------------------------------------------------
// sigma_q integrals

double sigma_integral(const FockParams& params, const MeasureModel& mu, const EntireFn& f, double q,
                      const QuadratureOptions& opts)
{
    require_dim(params, mu);
    if (f.dim() != params.n()) {
        throw DimensionMismatch("sigma_integral: function dimension differs from n");
    }
    if (!(q >= 1.0)) {
        throw PreconditionError("sigma_integral exponent must be at least 1");
    }
    if (mu.is_zero()) {
        return 0.0;
    }
    if (std::isinf(q)) {
        double best = 0.0;
        for (const auto* leaf : mu.leaves()) {
            if (leaf->is_zero()) {
                continue;
            }
            if (const auto* a = std::get_if<Atomic>(&leaf->variant())) {
                for (const auto& at : a->atoms) {
                    if (at.weight > 0.0) {
                        best = std::max(best, std::abs(eval_damped(params, f, at.point)));
                    }
                }
            } else if (const auto* b = std::get_if<BallIndicator>(&leaf->variant())) {
                require_plane(params, "sup over a ball support");
                const SupResult global = norm_inf(params, f);
                if (std::sqrt(dist2(global.argmax, b->center)) <= b->radius) {
                    best = std::max(best, global.value);
                    continue;
                }
                const double h = 0.02;
                const auto m = static_cast<long>(std::ceil(b->radius / h));
                for (long i = -m; i <= m; ++i) {
                    for (long j = -m; j <= m; ++j) {
                        const cplx d(static_cast<double>(i) * h, static_cast<double>(j) * h);
                        if (std::abs(d) <= b->radius) {
                            best = std::max(best, std::abs(eval_damped(params, f, CPoint{b->center[0] + d})));
                        }
                    }
                }
                for (int k = 0; k < 4096; ++k) {
                    const cplx d = std::polar(b->radius, 2.0 * kPi * k / 4096.0);
                    best = std::max(best, std::abs(eval_damped(params, f, CPoint{b->center[0] + d})));
                }
            } else {
                best = std::max(best, norm_inf(params, f).value);
            }
        }
        return best;
    }
    const Focus hint = function_focus(params, f, q);
    const double integral = converge<double>(params.n(), opts, "sigma_integral", [&](int level) {
        const auto rule = measure_rule(params, mu, hint, level, opts);
        std::vector<cplx> vals(rule.size());
        eval_damped_batch(params, f, params.n(), rule.re(), rule.im(), vals);
        const auto w = rule.weights();
        double s = 0.0;
        for (std::size_t i = 0; i < vals.size(); ++i) {
            s += w[i] * std::pow(std::abs(vals[i]), q);
        }
        return s;
    });
    return std::pow(integral, 1.0 / q);
}

} // namespace fock
