#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "fock/core.hpp"

namespace fock {

/// A truncated r/2-lattice: the balls D(z_k, r/2) cover, the balls D(z_k, r/4) are disjoint.
struct Lattice {
    int n = 1;
    double r = 0.0;
    /// Coordinate step of the generating grid.
    double spacing = 0.0;
    double bound_radius = 0.0;
    /// Sorted by |z_k|, ties broken on real then imaginary parts.
    std::vector<CPoint> points;

    std::size_t size() const { return points.size(); }
};

/// Square grid of step 0.6 r on C; the checkerboard lattice D_{2n} on C^n for n = 2, 3.
Lattice build_lattice(const FockParams& params, double r, double bound_radius);

/// Guaranteed covering radius of the untruncated generating grid.
double design_covering_radius(const Lattice& lat);

/// Smallest pairwise distance between lattice points.
double min_center_distance(const Lattice& lat);

/// max over samples of #{k : |sample - z_k| < delta}.
int covering_multiplicity(const Lattice& lat, double delta, const std::vector<CPoint>& samples);

struct CoveringReport {
    bool covered = true;
    /// Largest nearest-center distance over the samples.
    double worst_gap = 0.0;
    CPoint worst_sample;
};

/// Checks that each sample lies within r/2 of some lattice point.
CoveringReport verify_covering(const Lattice& lat, const std::vector<CPoint>& samples);

/// Independent uniform samples of the ball |z| <= radius in C^n.
std::vector<CPoint> uniform_ball_samples(int n, double radius, std::size_t count,
                                         std::uint64_t seed);

/// Points of the square grid of the given step inside the disc |z| <= radius (n = 1).
std::vector<CPoint> disc_grid_samples(double radius, double step);

/// CSV rows: k, then Re and Im of each coordinate.
void write_lattice_csv(const Lattice& lat, std::ostream& out);

} // namespace fock
