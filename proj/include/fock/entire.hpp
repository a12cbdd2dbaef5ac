#pragma once

#include <span>
#include <variant>
#include <vector>

#include "fock/core.hpp"

namespace fock {

/// sum_k coeffs[k] z^k on C (n = 1 only).
struct Monomial {
    std::vector<cplx> coeffs;
};

/// sum_j weights[j] k_{centers[j]}(z), normalized kernels.
struct KernelCombo {
    std::vector<cplx> weights;
    std::vector<CPoint> centers;
};

/// A test function: one of the two supported families of entire functions.
class EntireFn {
public:
    static EntireFn monomial(std::vector<cplx> coeffs);
    static EntireFn combo(std::vector<cplx> weights, std::vector<CPoint> centers);

    /// c * k_w.
    static EntireFn kernel_at(const CPoint& w, cplx c = 1.0);
    /// The constant c on C^n, written as c * k_0.
    static EntireFn constant(int n, cplx c = 1.0);

    int dim() const { return dim_; }
    bool is_monomial() const { return std::holds_alternative<Monomial>(v_); }
    const Monomial* as_monomial() const { return std::get_if<Monomial>(&v_); }
    const KernelCombo* as_combo() const { return std::get_if<KernelCombo>(&v_); }
    std::size_t terms() const;

    /// Radius of the smallest origin-centred ball holding every bump of |f| e^{-alpha|z|^2/2}:
    /// max |w_j| for combinations, sqrt(deg / alpha) for monomials.
    double bump_radius(double alpha) const;

    EntireFn scaled(cplx c) const;

private:
    EntireFn(std::variant<Monomial, KernelCombo> v, int dim) : v_(std::move(v)), dim_(dim) {}

    std::variant<Monomial, KernelCombo> v_;
    int dim_ = 1;
};

/// Pointwise value f(z); alpha fixes the kernels of a combination.
cplx eval_entire(const FockParams& params, const EntireFn& f, const CPoint& z);

/// f(z) exp(-alpha |z|^2 / 2), evaluated without forming either factor alone.
cplx eval_damped(const FockParams& params, const EntireFn& f, const CPoint& z);

/// Damped values at many points of C (n = 1), points split into real/imaginary spans.
void eval_damped_plane(const FockParams& params, const EntireFn& f, std::span<const double> re,
                       std::span<const double> im, std::span<cplx> out);

/// Damped values at many points of C^n, coordinates stored node-major.
void eval_damped_batch(const FockParams& params, const EntireFn& f, int dim,
                       std::span<const double> re, std::span<const double> im,
                       std::span<cplx> out);

} // namespace fock
