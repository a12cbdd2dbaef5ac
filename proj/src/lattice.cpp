#include "fock/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <string>

#include "fock/csv.hpp"
#include "fock/errors.hpp"
#include "fock/simd.hpp"

namespace fock {

namespace {

constexpr double kPlaneStep = 0.6;
// Minimum distance of the checkerboard lattice, in units of r, for n = 2 and n = 3.
constexpr double kCheckerMinDist[] = {0.0, 0.0, 0.6, 0.54};
constexpr std::size_t kMaxPoints = 2'000'000;

struct IntPoint {
    std::vector<long> c;
    long norm2 = 0;
};

bool int_less(const IntPoint& a, const IntPoint& b)
{
    if (a.norm2 != b.norm2) {
        return a.norm2 < b.norm2;
    }
    // Ties: real parts first, then imaginary parts.
    const std::size_t n = a.c.size() / 2;
    for (std::size_t j = 0; j < n; ++j) {
        if (a.c[2 * j] != b.c[2 * j]) {
            return a.c[2 * j] < b.c[2 * j];
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (a.c[2 * j + 1] != b.c[2 * j + 1]) {
            return a.c[2 * j + 1] < b.c[2 * j + 1];
        }
    }
    return false;
}

// Enumerates integer vectors of length d with squared norm <= limit2 and, when
// `checkerboard` is set, even coordinate sum.
void enumerate(std::size_t d, long m, double limit2, bool checkerboard, IntPoint& cur,
               long partial, std::vector<IntPoint>& out)
{
    const std::size_t j = cur.c.size();
    if (j == d) {
        long sum = 0;
        for (long v : cur.c) {
            sum += v;
        }
        if (!checkerboard || sum % 2 == 0) {
            cur.norm2 = partial;
            out.push_back(cur);
            if (out.size() > kMaxPoints) {
                throw PreconditionError("lattice exceeds the point budget; reduce bound_radius");
            }
        }
        return;
    }
    for (long v = -m; v <= m; ++v) {
        const long next = partial + v * v;
        if (static_cast<double>(next) > limit2) {
            continue;
        }
        cur.c.push_back(v);
        enumerate(d, m, limit2, checkerboard, cur, next, out);
        cur.c.pop_back();
    }
}

void split_plane(const std::vector<CPoint>& pts, std::vector<double>& x, std::vector<double>& y)
{
    x.resize(pts.size());
    y.resize(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        x[i] = pts[i][0].real();
        y[i] = pts[i][0].imag();
    }
}

double nearest_dist2(const Lattice& lat, const CPoint& z)
{
    double best = kInf;
    for (const auto& p : lat.points) {
        best = std::min(best, dist2(z, p));
    }
    return best;
}

} // namespace

Lattice build_lattice(const FockParams& params, double r, double bound_radius)
{
    if (!(r > 0.0)) {
        throw PreconditionError("lattice scale r must be positive");
    }
    if (!(bound_radius >= 4.0 * r)) {
        throw PreconditionError("bound_radius must be at least 4 r");
    }
    const int n = params.n();
    if (n > 3) {
        throw Unsupported("no r/2-lattice construction for complex dimension n >= 4");
    }
    Lattice lat;
    lat.n = n;
    lat.r = r;
    lat.bound_radius = bound_radius;
    const bool checker = n >= 2;
    lat.spacing = checker ? kCheckerMinDist[n] * r / std::sqrt(2.0) : kPlaneStep * r;

    const double limit = bound_radius / lat.spacing;
    const auto m = static_cast<long>(std::floor(limit));
    std::vector<IntPoint> ints;
    IntPoint cur;
    enumerate(static_cast<std::size_t>(2 * n), m, limit * limit * (1.0 + 1e-12), checker, cur,
              0, ints);
    if (ints.empty()) {
        throw PreconditionError("bound_radius too small to contain any lattice point");
    }
    std::sort(ints.begin(), ints.end(), int_less);

    lat.points.reserve(ints.size());
    for (const auto& ip : ints) {
        std::vector<cplx> c(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            const auto jj = static_cast<std::size_t>(j);
            c[jj] = cplx(static_cast<double>(ip.c[2 * jj]) * lat.spacing,
                         static_cast<double>(ip.c[2 * jj + 1]) * lat.spacing);
        }
        lat.points.emplace_back(std::move(c));
    }
    return lat;
}

double design_covering_radius(const Lattice& lat)
{
    if (lat.n == 1) {
        return lat.spacing / std::sqrt(2.0);
    }
    // Deep holes of D_d: (1, 0, ..., 0) and (1/2, ..., 1/2).
    return lat.spacing * std::max(1.0, std::sqrt(2.0 * lat.n) / 2.0);
}

double min_center_distance(const Lattice& lat)
{
    const std::size_t count = lat.size();
    if (count < 2) {
        return kInf;
    }
    double best = kInf;
    if (lat.n == 1) {
        std::vector<double> x, y;
        split_plane(lat.points, x, y);
        double d2 = 0.0;
        for (std::size_t i = 0; i + 1 < count; ++i) {
            simd::min_dist2(std::span(x).subspan(i, 1), std::span(y).subspan(i, 1),
                            std::span(x).subspan(i + 1), std::span(y).subspan(i + 1),
                            std::span(&d2, 1));
            best = std::min(best, d2);
        }
        return std::sqrt(best);
    }
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = i + 1; j < count; ++j) {
            best = std::min(best, dist2(lat.points[i], lat.points[j]));
        }
    }
    return std::sqrt(best);
}

int covering_multiplicity(const Lattice& lat, double delta, const std::vector<CPoint>& samples)
{
    if (samples.empty()) {
        throw PreconditionError("covering_multiplicity needs at least one sample");
    }
    if (!(delta > 0.0)) {
        throw PreconditionError("delta must be positive");
    }
    for (const auto& s : samples) {
        if (s.dim() != lat.n) {
            throw DimensionMismatch("sample dimension differs from the lattice");
        }
        if (s.norm() > lat.bound_radius - delta + 1e-12) {
            throw PreconditionError("samples must lie within bound_radius - delta");
        }
    }
    if (lat.n == 1) {
        std::vector<double> cx, cy, px, py;
        split_plane(lat.points, cx, cy);
        split_plane(samples, px, py);
        std::vector<int> counts(samples.size());
        simd::count_within(px, py, cx, cy, delta * delta, counts);
        return *std::max_element(counts.begin(), counts.end());
    }
    int best = 0;
    for (const auto& s : samples) {
        int c = 0;
        for (const auto& p : lat.points) {
            c += dist2(s, p) < delta * delta ? 1 : 0;
        }
        best = std::max(best, c);
    }
    return best;
}

CoveringReport verify_covering(const Lattice& lat, const std::vector<CPoint>& samples)
{
    CoveringReport rep;
    if (samples.empty()) {
        return rep;
    }
    for (const auto& s : samples) {
        if (s.dim() != lat.n) {
            throw DimensionMismatch("sample dimension differs from the lattice");
        }
        if (s.norm() > lat.bound_radius - lat.r + 1e-12) {
            throw PreconditionError("samples must lie within bound_radius - r");
        }
    }
    std::vector<double> d2(samples.size());
    if (lat.n == 1) {
        std::vector<double> cx, cy, px, py;
        split_plane(lat.points, cx, cy);
        split_plane(samples, px, py);
        simd::min_dist2(px, py, cx, cy, d2);
    } else {
        for (std::size_t i = 0; i < samples.size(); ++i) {
            d2[i] = nearest_dist2(lat, samples[i]);
        }
    }
    const auto worst = std::max_element(d2.begin(), d2.end());
    rep.worst_gap = std::sqrt(*worst);
    rep.worst_sample = samples[static_cast<std::size_t>(worst - d2.begin())];
    rep.covered = rep.worst_gap < 0.5 * lat.r;
    return rep;
}

std::vector<CPoint> uniform_ball_samples(int n, double radius, std::size_t count,
                                         std::uint64_t seed)
{
    if (n < 1 || !(radius > 0.0)) {
        throw PreconditionError("uniform_ball_samples needs n >= 1 and a positive radius");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<CPoint> out;
    out.reserve(count);
    const auto d = static_cast<std::size_t>(2 * n);
    std::vector<double> g(d);
    for (std::size_t i = 0; i < count; ++i) {
        double s = 0.0;
        for (auto& v : g) {
            v = gauss(rng);
            s += v * v;
        }
        const double rad = radius * std::pow(unif(rng), 1.0 / static_cast<double>(d));
        const double scale = s > 0.0 ? rad / std::sqrt(s) : 0.0;
        std::vector<cplx> c(static_cast<std::size_t>(n));
        for (std::size_t j = 0; j < c.size(); ++j) {
            c[j] = cplx(g[2 * j] * scale, g[2 * j + 1] * scale);
        }
        out.emplace_back(std::move(c));
    }
    return out;
}

std::vector<CPoint> disc_grid_samples(double radius, double step)
{
    if (!(radius > 0.0) || !(step > 0.0)) {
        throw PreconditionError("disc_grid_samples needs positive radius and step");
    }
    const auto m = static_cast<long>(std::floor(radius / step));
    std::vector<CPoint> out;
    for (long i = -m; i <= m; ++i) {
        for (long j = -m; j <= m; ++j) {
            const cplx z(static_cast<double>(i) * step, static_cast<double>(j) * step);
            if (std::abs(z) <= radius) {
                out.push_back(CPoint{z});
            }
        }
    }
    return out;
}

void write_lattice_csv(const Lattice& lat, std::ostream& out)
{
    out << "k";
    for (int j = 1; j <= lat.n; ++j) {
        out << ",re_" << j << ",im_" << j;
    }
    out << '\n';
    for (std::size_t k = 0; k < lat.size(); ++k) {
        out << k;
        for (const auto& c : lat.points[k].coords()) {
            out << ',' << fmt(c.real()) << ',' << fmt(c.imag());
        }
        out << '\n';
    }
}

} // namespace fock
