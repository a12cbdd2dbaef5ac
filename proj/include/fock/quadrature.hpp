#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fock/core.hpp"
#include "fock/errors.hpp"

namespace fock {

/// Nodes and weights of the order-point Gauss-Legendre rule on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int order);

/// A weighted point set: sum_i weights[i] g(node_i) approximates an integral of g.
///
/// Coordinates are stored node-major (re[i*n + j] is Re of coordinate j of node i); for
/// n = 1 the two arrays are directly usable by the SIMD kernels.
class QuadratureScheme {
public:
    QuadratureScheme() = default;
    QuadratureScheme(int dim, std::vector<double> re, std::vector<double> im,
                     std::vector<double> weights, int order, double cutoff_radius);

    int dim() const { return dim_; }
    std::size_t size() const { return weights_.size(); }
    bool empty() const { return weights_.empty(); }
    CPoint node(std::size_t i) const;
    cplx plane_node(std::size_t i) const { return {re_[i], im_[i]}; }
    std::span<const double> re() const { return re_; }
    std::span<const double> im() const { return im_; }
    std::span<const double> weights() const { return weights_; }
    int order() const { return order_; }
    double cutoff_radius() const { return cutoff_; }

    /// Concatenation; both operands must share the dimension.
    void append(const QuadratureScheme& other);
    /// Multiplies every weight by s.
    void scale_weights(double s);
    /// Multiplies weight i by density(node_i).
    template <class Density>
    void reweight(Density&& density)
    {
        for (std::size_t i = 0; i < size(); ++i) {
            weights_[i] *= density(node(i));
        }
    }
    /// Drops nodes whose weight is not positive.
    void prune();

private:
    int dim_ = 1;
    std::vector<double> re_, im_, weights_;
    int order_ = 0;
    double cutoff_ = 0.0;
};

/// Polar product rule on the disc |z - center| <= cutoff in C. The radial direction is
/// integrated in u = r^2 with `panels` uniform Gauss-Legendre panels of `gl_order` points;
/// the angle uses `angular` equally spaced nodes.
QuadratureScheme polar_rule(cplx center, double cutoff, int panels, int gl_order, int angular);

/// Randomly shifted Halton points pushed through a Gaussian of the given rate about
/// `center`, with importance weights so that the scheme integrates against dV on C^n.
QuadratureScheme qmc_gaussian_rule(const CPoint& center, double rate, std::size_t count,
                                   std::uint64_t seed);

/// Where an integrand lives: every bump of it sits within `extent` of `center` and decays at
/// least like exp(-rate d^2) away from its own peak.
struct Focus {
    CPoint center;
    double extent = 0.0;
    double rate = 1.0;
    /// Floor on the angular node count (angular frequencies of polynomial factors).
    int min_angular = 0;
    /// Integrand vanishes beyond this radius from `center` (compact supports).
    double max_radius = kInf;
};

/// log(1e16): Gaussian tails are cut where they fall below 1e-16 of the peak, which keeps
/// the neglected mass below 1e-14 of the integral.
inline constexpr double kTailLog = 36.841361487904734;

struct QuadratureOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-15;
    int max_refinements = 4;
    /// Monte Carlo paths (n >= 2).
    std::size_t mc_points = std::size_t{1} << 15;
    double mc_rel_tol = 5e-2;
    std::uint64_t seed = 20240531;
};

/// Rule adapted to `focus` at refinement `level` (each level doubles panels and angles in
/// the plane, points in C^n).
QuadratureScheme focus_rule(const Focus& focus, int level, const QuadratureOptions& opts);

namespace detail {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(cplx v) { return std::abs(v); }

} // namespace detail

/// Runs `eval(level)` at increasing refinement until two successive values agree within
/// tolerance; throws ConvergenceError naming `what` otherwise.
template <class T, class Eval>
T converge(int dim, const QuadratureOptions& opts, const std::string& what, Eval&& eval)
{
    const double tol = dim == 1 ? opts.rel_tol : opts.mc_rel_tol;
    T prev = eval(0);
    double last_gap = 0.0;
    for (int level = 1; level <= opts.max_refinements; ++level) {
        T cur = eval(level);
        last_gap = detail::magnitude(cur - prev);
        if (!std::isfinite(last_gap)) {
            break;
        }
        if (last_gap <= tol * detail::magnitude(cur) + opts.abs_tol) {
            return cur;
        }
        prev = cur;
    }
    throw ConvergenceError(what + ": quadrature did not converge (last refinement gap " +
                           std::to_string(last_gap) + ")");
}

} // namespace fock
