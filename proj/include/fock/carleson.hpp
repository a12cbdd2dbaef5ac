#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "fock/core.hpp"
#include "fock/entire.hpp"
#include "fock/measure.hpp"
#include "fock/toeplitz.hpp"

namespace fock {

enum class Criterion { berezin_sup, berezin_l1, avg_fn, avg_seq, finite_mass, seq_lpq };

std::string_view criterion_name(Criterion c);

struct CarlesonSettings {
    /// Berezin parameter of the sup/L^1 criteria.
    double t = 2.0;
    /// Radius of the averaging function.
    double delta = 1.0;
    /// Lattice scale and truncation for averaging sequences and the f0 test.
    double r = 1.0;
    double bound_radius = 6.0;
    /// Profile must fall below decay_epsilon * sup at the largest radius.
    double decay_epsilon = 1e-6;
    /// Vanishing-profile radii; empty picks them from the measure's decay.
    std::vector<double> radii;
    /// Band constant C of the equivalence suite.
    double band = 10.0;
    /// Quantities whose pairwise ratios must stay in [1/C, C].
    std::vector<std::string> band_quantities = {"op_norm_lb", "embedding_lb", "proxy"};
    /// Radial grid of kernel tests (f0 is always added).
    std::vector<double> test_radii = {0.0, 1.0, 2.0, 3.0};
    int test_angles = 4;
    /// Compute op-norm and embedding lower bounds (the expensive part of a report).
    bool estimate_norms = true;
    ProfileGrid grid;
    /// Norm estimates only feed lower bounds and band checks, so their quadrature stops at 1e-4.
    QuadratureOptions quad = [] {
        QuadratureOptions q;
        q.rel_tol = 1e-4;
        return q;
    }();
};

struct VanishingResult {
    bool decays = true;
    std::vector<double> radii;
    /// sup over |z| = R of the t-Berezin transform, per radius.
    std::vector<double> profile;
};

/// Radial decay test of the t-Berezin transform.
VanishingResult vanishing_check(const FockParams& params, const MeasureModel& mu, double t,
                                const std::vector<double>& radii, double decay_epsilon = 1e-6,
                                const QuadratureOptions& opts = {});

/// Radii for vanishing_check chosen from the measure's decay.
std::vector<double> default_vanishing_radii(const FockParams& params, const MeasureModel& mu, double t);

struct CarlesonDecision {
    double p = 1.0;
    double q = 1.0;
    bool is_carleson = false;
    bool is_vanishing = false;
    Criterion criterion = Criterion::berezin_sup;
    double proxy_norm = 0.0;
    VanishingResult evidence;
};

/// max over tests of sigma_integral(mu, f, q) / ||f||_p.
NormEstimate embedding_norm_estimate(const FockParams& params, const MeasureModel& mu, double p, double q,
                                     const std::vector<EntireFn>& tests, const QuadratureOptions& opts = {},
                                     const std::vector<double>* test_norms = nullptr);

/// (p, q) Fock-Carleson membership from the implemented criteria.
CarlesonDecision is_carleson(const FockParams& params, const MeasureModel& mu, double p, double q,
                             const CarlesonSettings& settings = {});

struct ClassificationReport {
    double p = 1.0;
    double q = 1.0;
    /// Which row of the decision table applied.
    std::string regime;
    Criterion criterion = Criterion::berezin_sup;
    bool bounded = false;
    bool compact = false;
    double norm_proxy = 0.0;
    double norm_lower_bound = 0.0;
    double embedding_lower_bound = 0.0;
    /// Every quantity of the relevant norm chain.
    std::map<std::string, double> quantities;
    /// "a/b" -> quantities[a] / quantities[b] over the finite, positive quantities.
    std::map<std::string, double> equivalence_ratios;
    VanishingResult evidence;
};

/// Boundedness and compactness of T_mu: F^p -> F^q.
ClassificationReport classify_toeplitz(const FockParams& params, const MeasureModel& mu, double p, double q,
                                       const CarlesonSettings& settings = {});

struct EquivalenceRow {
    std::string name;
    bool included = true;
    std::string note;
    std::map<std::string, double> quantities;
    std::map<std::string, double> ratios;
};

struct EquivalenceTable {
    double p = 1.0;
    double q = 1.0;
    double band = 10.0;
    std::vector<EquivalenceRow> rows;
    /// Smallest and largest value of each banded ratio over the included rows.
    std::map<std::string, std::pair<double, double>> ratio_range;
    bool passes = true;
};

/// Chain quantities and their ratios across a family; passes iff every banded ratio lies in
/// [1/C, C] for every included member.
EquivalenceTable equivalence_suite(const FockParams& params, const std::vector<MeasureModel>& family,
                                   const std::vector<std::string>& names, double p, double q,
                                   const CarlesonSettings& settings = {});

} // namespace fock
