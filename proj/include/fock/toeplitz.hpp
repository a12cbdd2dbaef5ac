#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "fock/core.hpp"
#include "fock/entire.hpp"
#include "fock/lattice.hpp"
#include "fock/measure.hpp"
#include "fock/quadrature.hpp"

namespace fock {

/// K x K truncation of T_mu on F^2_alpha(C) in the basis e_k = sqrt(alpha^k / k!) z^k.
class ToeplitzMatrix {
public:
    ToeplitzMatrix(FockParams params, Eigen::MatrixXcd entries);

    const FockParams& params() const { return params_; }
    int order() const { return static_cast<int>(m_.rows()); }
    const Eigen::MatrixXcd& entries() const { return m_; }
    cplx operator()(int j, int k) const { return m_(j, k); }

    /// Singular values, largest first.
    std::vector<double> singular_values() const;
    double trace() const;
    /// Largest |M - M^H| entry.
    double hermitian_defect() const;
    double min_eigenvalue() const;

private:
    FockParams params_;
    Eigen::MatrixXcd m_;
};

/// Default truncation order for matrix-based queries.
inline constexpr int kDefaultOrder = 64;

/// T_mu f(z) by quadrature (closed form for atoms).
cplx apply(const FockParams& params, const MeasureModel& mu, const EntireFn& f, const CPoint& z,
           const QuadratureOptions& opts = {});

/// The matrix of T_mu (n = 1).
ToeplitzMatrix matrix(const FockParams& params, const MeasureModel& mu, int order,
                      const QuadratureOptions& opts = {});

/// Truncation order that represents T_mu f well for functions with bumps within `reach`.
int image_order(const FockParams& params, const MeasureModel& mu, double reach);

/// T_mu f as an entire function: a kernel combination when every leaf has a closed-form
/// image (Lebesgue, atoms, Gaussians) and f is a combination, otherwise a monomial
/// expansion through the truncated matrix (n = 1).
EntireFn image(const FockParams& params, const MeasureModel& mu, const EntireFn& f,
               const QuadratureOptions& opts = {});

/// Same, reusing an already assembled matrix for the monomial route.
EntireFn image(const FockParams& params, const MeasureModel& mu, const EntireFn& f,
               const ToeplitzMatrix* cached, const QuadratureOptions& opts = {});

struct SpectralNorm {
    double value = 0.0;
    /// |norm(K) - norm(K/2)|.
    double delta = 0.0;
    int order = 0;
};

/// Largest singular value of matrix(mu, K) with the K/2 convergence delta.
SpectralNorm hilbert_norm(const FockParams& params, const MeasureModel& mu, int order = kDefaultOrder,
                          const QuadratureOptions& opts = {});

struct TraceResult {
    double value = 0.0;
    /// The measure has infinite mass, so the trace diverges as K grows.
    bool diverges = false;
};

TraceResult trace(const FockParams& params, const MeasureModel& mu, int order = kDefaultOrder,
                  const QuadratureOptions& opts = {});

/// ||g||_{(p,alpha)} using the cheapest exact route: unit kernels, the F^2 Gram form,
/// the sup grid for p = infinity, quadrature otherwise.
double fock_norm(const FockParams& params, const EntireFn& g, double p,
                 const QuadratureOptions& opts = {});

struct NormEstimate {
    double lower_bound = 0.0;
    /// Index of the maximizing test, -1 when no test was usable.
    int witness = -1;
    std::vector<double> ratios;
};

/// max over tests of ||T_mu f||_q / ||f||_p. `test_norms`, when given, holds ||f||_p per test.
NormEstimate op_norm_estimate(const FockParams& params, const MeasureModel& mu, double p, double q,
                              const std::vector<EntireFn>& tests, const QuadratureOptions& opts = {},
                              const std::vector<double>* test_norms = nullptr);

/// k_z for z on a radial grid, plus f0 = sum of k_{z_j} over lattice points with
/// |z_j| <= bound_radius - r.
std::vector<EntireFn> default_tests(const FockParams& params, const Lattice& lat,
                                    const std::vector<double>& radii = {0.0, 1.0, 2.0, 3.0},
                                    int angles = 4);

/// The truncated f0 on its own.
EntireFn lattice_test_function(const FockParams& params, const Lattice& lat);

/// (alpha/pi)^n integral of T_mu k_z conj(k_z) exp(-alpha|eta|^2) dV(eta).
double berezin_from_operator(const FockParams& params, const MeasureModel& mu, const CPoint& z,
                             const QuadratureOptions& opts = {});

/// CSV rows j, k, Re, Im.
void write_matrix_csv(const ToeplitzMatrix& m, std::ostream& out);
/// CSV rows index, singular value.
void write_spectrum_csv(const std::vector<double>& sv, std::ostream& out);

} // namespace fock
