#pragma once

#include "fock/core.hpp"
#include "fock/entire.hpp"
#include "fock/quadrature.hpp"

namespace fock {

/// ||f||_{(p,alpha)} by a fixed scheme (the scheme integrates against dV).
double norm_p(const FockParams& params, const EntireFn& f, double p,
              const QuadratureScheme& scheme);

/// ||f||_{(p,alpha)} with rules adapted to f, refined until two levels agree.
double norm_p(const FockParams& params, const EntireFn& f, double p,
              const QuadratureOptions& opts = {});

/// Rule that resolves |f|^p exp(-p alpha |z|^2 / 2) at refinement `level`.
QuadratureScheme norm_rule(const FockParams& params, const EntireFn& f, double p, int level,
                           const QuadratureOptions& opts);

struct SupGrid {
    /// Grid step in each real coordinate.
    double spacing = 0.05;
    /// Half-width of the grid; 0 picks the decay-certificate radius.
    double radius = 0.0;
    /// Polish the best grid points by local pattern search.
    bool refine = true;
    /// Envelope level, relative to the running sup, that certifies the grid edge.
    double certificate = 1e-12;
};

struct SupResult {
    double value = 0.0;
    CPoint argmax;
    double resolution = 0.0;
    double radius = 0.0;
};

/// Radius beyond which the analytic envelope of |f| exp(-alpha|z|^2/2) stays below
/// `level`; monotone decay holds past it.
double envelope_radius(const FockParams& params, const EntireFn& f, double level);

/// sup |f(z)| exp(-alpha |z|^2 / 2).
SupResult norm_inf(const FockParams& params, const EntireFn& f, const SupGrid& grid = {});

/// Reproduction of f(z) from its values through the kernel, minus f(z), both damped by
/// exp(-alpha |z|^2 / 2).
cplx reproducing_residual(const FockParams& params, const EntireFn& f, const CPoint& z,
                          const QuadratureOptions& opts = {});

} // namespace fock
