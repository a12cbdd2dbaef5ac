#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "fock/core.hpp"
#include "fock/entire.hpp"
#include "fock/lattice.hpp"
#include "fock/quadrature.hpp"

namespace fock {

/// scale * exp(-beta |z - center|^2) dV.
struct GaussianDensity {
    double beta = 1.0;
    CPoint center;
    double scale = 1.0;
};

/// scale * dV.
struct Lebesgue {
    double scale = 1.0;
};

/// scale * 1_{|z - center| < radius} dV.
struct BallIndicator {
    CPoint center;
    double radius = 1.0;
    double scale = 1.0;
};

/// scale * |z|^{2m} exp(-beta |z|^2) dV.
struct RadialPolyGaussian {
    int m = 0;
    double beta = 1.0;
    double scale = 1.0;
};

struct Atom {
    CPoint point;
    double weight = 0.0;
};

/// sum_i weight_i delta_{point_i}; no atoms is the zero measure.
struct Atomic {
    std::vector<Atom> atoms;
};

class MeasureModel;

struct Mixture {
    std::vector<MeasureModel> components;
};

/// A nonnegative Borel measure from a closed family. Construct through the factories, which
/// validate every field.
class MeasureModel {
public:
    using Variant =
        std::variant<GaussianDensity, Lebesgue, BallIndicator, RadialPolyGaussian, Atomic, Mixture>;

    static MeasureModel gaussian(double beta, CPoint center, double scale = 1.0);
    static MeasureModel lebesgue(double scale = 1.0);
    static MeasureModel ball(CPoint center, double radius, double scale = 1.0);
    static MeasureModel radial_poly(int m, double beta, double scale = 1.0);
    static MeasureModel atomic(std::vector<Atom> atoms);
    static MeasureModel mixture(std::vector<MeasureModel> components);
    static MeasureModel zero();

    const Variant& variant() const { return v_; }

    /// Dimension fixed by centers or atoms; 0 when the measure does not pin one.
    int dim() const;
    bool is_zero() const;
    /// c * mu for c >= 0.
    MeasureModel scaled(double c) const;
    /// Compact textual form, e.g. "gaussian(beta=1,center=(0,0),scale=1)".
    std::string describe() const;

    /// Mixture components, or the measure itself.
    std::vector<const MeasureModel*> leaves() const;

private:
    explicit MeasureModel(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

/// Throws DimensionMismatch unless the measure lives on C^n for params.n().
void require_dim(const FockParams& params, const MeasureModel& mu);

/// mu(C^n), possibly +infinity.
double total_mass(const FockParams& params, const MeasureModel& mu);

/// mu({|z| > radius}).
double tail_mass(const FockParams& params, const MeasureModel& mu, double radius);

/// mu(D(z, radius)).
double ball_mass(const FockParams& params, const MeasureModel& mu, const CPoint& z,
                 double radius, const QuadratureOptions& opts = {});

struct SequenceNorms {
    std::vector<double> values;
    double l1 = 0.0;
    double linf = 0.0;
    /// l^s norm for every requested s.
    std::map<double, double> ls;
    /// Bound on the l^1 mass of the terms beyond the truncation.
    double tail_bound = 0.0;
    /// The untruncated sequence has infinite l^1 (and l^s, s < infinity) norm.
    bool infinite_tail = false;
};

/// (mu(D(z_k, radius)))_k in lattice order with norms of the untruncated sequence.
SequenceNorms averaging_sequence(const FockParams& params, const MeasureModel& mu,
                                 const Lattice& lat, double radius,
                                 const std::vector<double>& exponents = {},
                                 const QuadratureOptions& opts = {});

/// Weighted points with sum_i w_i g(x_i) ~ integral of g dmu, resolving integrands that
/// are concentrated as described by `hint` (rate 0: no extra concentration).
QuadratureScheme measure_rule(const FockParams& params, const MeasureModel& mu,
                              const Focus& hint, int level, const QuadratureOptions& opts);

/// Atomic stand-in for mu, accurate for integrands concentrated as `hint` describes.
MeasureModel discretize(const FockParams& params, const MeasureModel& mu, const Focus& hint,
                        int level, const QuadratureOptions& opts = {});

/// t-Berezin transform: integral of exp(-t alpha |z - w|^2 / 2) dmu(z).
double berezin(const FockParams& params, const MeasureModel& mu, double t, const CPoint& w,
               const QuadratureOptions& opts = {});

/// The same transform from its defining integral of |k_w(z)|^t exp(-t alpha |z|^2/2).
double berezin_direct(const FockParams& params, const MeasureModel& mu, double t,
                      const CPoint& w, const QuadratureOptions& opts = {});

enum class NormMode { sup, l1 };

/// Grid for sup searches over C (n = 1) or radial rays.
struct ProfileGrid {
    double spacing = 0.1;
    /// 0: derive the radius from the measure's decay.
    double radius = 0.0;
};

struct FunctionalNorm {
    double value = 0.0;
    bool finite = true;
    /// No decay certificate: value is only a lower bound of the true norm.
    bool lower_bound_only = false;
    /// Where the sup was found (sup mode).
    CPoint argmax;
    /// Radius the search or integral covered.
    double radius = 0.0;
};

/// sup or L^1 norm of the t-Berezin transform.
FunctionalNorm berezin_norm(const FockParams& params, const MeasureModel& mu, double t,
                            NormMode mode, const ProfileGrid& grid = {},
                            const QuadratureOptions& opts = {});

/// sup_z mu(D(z, delta)).
FunctionalNorm averaging_function_sup(const FockParams& params, const MeasureModel& mu,
                                      double delta, const ProfileGrid& grid = {},
                                      const QuadratureOptions& opts = {});

struct BerezinProfile {
    double t = 2.0;
    std::vector<std::pair<CPoint, double>> samples;
    double sup_estimate = 0.0;
    double l1_estimate = 0.0;
};

/// mu~_t at the given points, plus the global sup and L^1 estimates.
BerezinProfile berezin_profile(const FockParams& params, const MeasureModel& mu, double t,
                               const std::vector<CPoint>& points,
                               const QuadratureOptions& opts = {});

struct AdmissibilityReport {
    bool finite = true;
    std::vector<double> values;
};

/// integral of |K_w(z)|^2 exp(-alpha|w|^2) dmu(w) at each sample z.
AdmissibilityReport admissibility(const FockParams& params, const MeasureModel& mu,
                                  const std::vector<CPoint>& samples,
                                  const QuadratureOptions& opts = {});

/// (integral of |f|^q exp(-q alpha |z|^2 / 2) dmu)^{1/q}; q = infinity gives the sup of
/// |f| exp(-alpha|z|^2/2) over the support of mu.
double sigma_integral(const FockParams& params, const MeasureModel& mu, const EntireFn& f,
                      double q, const QuadratureOptions& opts = {});

/// Concentration of |f|^q exp(-q alpha |z|^2/2) as a quadrature hint.
Focus function_focus(const FockParams& params, const EntireFn& f, double q);

/// Concentration of mu itself; rate 0 for Lebesgue.
Focus measure_focus(const FockParams& params, const MeasureModel& mu);

} // namespace fock
