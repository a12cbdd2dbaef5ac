#include "doctest.h"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "fock/errors.hpp"
#include "fock/lattice.hpp"
#include "fock/measure.hpp"

using namespace fock;
using std::numbers::pi;

namespace {

// Independent oracle: polar integral of g over the disc |z - c| < R (R may be large for
// Gaussian-weighted integrands), adaptive Gauss-Kronrod in both variables.
template <class G>
double disc_integral(cplx c, double R, G&& g)
{
    using boost::math::quadrature::gauss_kronrod;
    auto radial = [&](double r) {
        auto ang = [&](double th) { return g(c + std::polar(r, th)); };
        return r * gauss_kronrod<double, 61>::integrate(ang, 0.0, 2 * pi, 8, 1e-13);
    };
    return gauss_kronrod<double, 61>::integrate(radial, 0.0, R, 10, 1e-13);
}

// Area of the intersection of two discs of radii a, b at center distance d.
double lens_area(double a, double b, double d)
{
    if (d >= a + b) {
        return 0.0;
    }
    if (d <= std::abs(a - b)) {
        double m = std::min(a, b);
        return pi * m * m;
    }
    double t1 = a * a * std::acos((d * d + a * a - b * b) / (2 * d * a));
    double t2 = b * b * std::acos((d * d + b * b - a * a) / (2 * d * b));
    double t3 = 0.5 * std::sqrt((-d + a + b) * (d + a - b) * (d - a + b) * (d + a + b));
    return t1 + t2 - t3;
}

const FockParams P(1.0, 1);

} // namespace

TEST_CASE("factories validate fields")
{
    CHECK_THROWS_AS(MeasureModel::gaussian(0.0, CPoint{cplx(0, 0)}), PreconditionError);
    CHECK_THROWS_AS(MeasureModel::ball(CPoint{cplx(0, 0)}, -1.0), PreconditionError);
    CHECK_THROWS_AS(MeasureModel::radial_poly(-1, 1.0), PreconditionError);
    CHECK_THROWS_AS(MeasureModel::atomic({{CPoint{cplx(0, 0)}, -1.0}}), PreconditionError);
    CHECK_THROWS_AS(MeasureModel::atomic({{CPoint{cplx(0, 0)}, 1.0}, {CPoint{cplx(0, 0), cplx(1, 0)}, 1.0}}),
                    DimensionMismatch);
    CHECK(MeasureModel::zero().is_zero());
    CHECK_THROWS_AS(require_dim(FockParams(1.0, 2), MeasureModel::gaussian(1.0, CPoint{cplx(0, 0)})),
                    DimensionMismatch);
}

TEST_CASE("total mass closed forms")
{
    CHECK(total_mass(P, MeasureModel::gaussian(2.0, CPoint{cplx(1, 1)}, 3.0)) == doctest::Approx(3 * pi / 2));
    CHECK(total_mass(P, MeasureModel::ball(CPoint{cplx(0, 1)}, 2.0)) == doctest::Approx(4 * pi));
    // integral of |z|^{2m} e^{-beta|z|^2} over C = pi m! / beta^{m+1}
    CHECK(total_mass(P, MeasureModel::radial_poly(3, 0.5)) == doctest::Approx(pi * 6 / std::pow(0.5, 4)));
    CHECK(std::isinf(total_mass(P, MeasureModel::lebesgue())));
    auto mix = MeasureModel::mixture({MeasureModel::atomic({{CPoint{cplx(0, 0)}, 1.5}}),
                                      MeasureModel::gaussian(1.0, CPoint{cplx(0, 0)})});
    CHECK(total_mass(P, mix) == doctest::Approx(1.5 + pi));
    CHECK(total_mass(P, mix.scaled(2.0)) == doctest::Approx(3 + 2 * pi));
}

TEST_CASE("ball masses against independent formulas")
{
    auto ball = MeasureModel::ball(CPoint{cplx(0, 0)}, 1.0);
    for (double d : {0.0, 0.5, 1.2, 1.9, 2.5}) {
        double got = ball_mass(P, ball, CPoint{cplx(d, 0)}, 1.0);
        CHECK(got == doctest::Approx(lens_area(1.0, 1.0, d)).epsilon(1e-8));
    }
    auto g = MeasureModel::gaussian(1.5, CPoint{cplx(0, 0)});
    CHECK(ball_mass(P, g, CPoint{cplx(0, 0)}, 0.8) ==
          doctest::Approx(pi / 1.5 * (1 - std::exp(-1.5 * 0.64))).epsilon(1e-8));
    CPoint z{cplx(1.0, -0.5)};
    double oracle = disc_integral(z[0], 0.8, [](cplx w) { return std::exp(-1.5 * std::norm(w)); });
    CHECK(ball_mass(P, g, z, 0.8) == doctest::Approx(oracle).epsilon(1e-7));
    CHECK(ball_mass(P, MeasureModel::lebesgue(2.0), z, 0.5) == doctest::Approx(2 * pi * 0.25));
    CHECK(tail_mass(P, g, 1.0) == doctest::Approx(pi / 1.5 * std::exp(-1.5)).epsilon(1e-8));
}

TEST_CASE("Berezin closed forms agree with direct integration")
{
    std::vector<MeasureModel> mus = {
        MeasureModel::gaussian(0.5, CPoint{cplx(1, 1)}, 2.0),
        MeasureModel::ball(CPoint{cplx(0.5, 0)}, 1.3),
        MeasureModel::radial_poly(2, 1.0),
        MeasureModel::atomic({{CPoint{cplx(0, 0)}, 1.0}, {CPoint{cplx(1, 0)}, 2.0}}),
    };
    for (double t : {0.5, 2.0}) {
        for (const auto& mu : mus) {
            for (cplx w : {cplx(0, 0), cplx(0.7, -0.4), cplx(2.5, 1.0)}) {
                CPoint pw{w};
                double a = berezin(P, mu, t, pw);
                double b = berezin_direct(P, mu, t, pw);
                CHECK(a == doctest::Approx(b).epsilon(1e-7));
            }
        }
    }
}

TEST_CASE("Berezin of a ball matches an external quadrature")
{
    auto ball = MeasureModel::ball(CPoint{cplx(0, 0)}, 1.0, 1.5);
    for (cplx w : {cplx(0, 0), cplx(0.9, 0.3), cplx(3, 0)}) {
        double oracle = 1.5 * disc_integral(0.0, 1.0, [&](cplx z) { return std::exp(-std::norm(z - w)); });
        CHECK(berezin(P, ball, 2.0, CPoint{w}) == doctest::Approx(oracle).epsilon(1e-9));
    }
}

TEST_CASE("Berezin of radial_poly matches an external quadrature")
{
    auto mu = MeasureModel::radial_poly(3, 0.7, 2.0);
    for (cplx w : {cplx(0, 0), cplx(1.1, -0.6), cplx(0, 4)}) {
        double oracle = 2.0 * disc_integral(0.0, 12.0, [&](cplx z) {
            return std::pow(std::norm(z), 3) * std::exp(-0.7 * std::norm(z) - 0.5 * std::norm(z - w));
        });
        CHECK(berezin(P, mu, 1.0, CPoint{w}) == doctest::Approx(oracle).epsilon(1e-9));
    }
}

TEST_CASE("Berezin of atoms and Lebesgue")
{
    auto atom = MeasureModel::atomic({{CPoint{cplx(0, 0)}, 1.0}});
    for (double r : {0.0, 1.0, 2.5}) {
        CHECK(berezin(P, atom, 2.0, CPoint{cplx(0, r)}) == doctest::Approx(std::exp(-r * r)));
    }
    CHECK(berezin(P, MeasureModel::lebesgue(), 2.0, CPoint{cplx(3, 3)}) == doctest::Approx(pi));
    CHECK(berezin(P, MeasureModel::lebesgue(), 0.5, CPoint{cplx(0, 0)}) == doctest::Approx(4 * pi));
    CHECK_THROWS_AS(berezin(P, atom, 0.0, CPoint{cplx(0, 0)}), PreconditionError);
}

TEST_CASE("Berezin norms and averaging sup")
{
    auto atom = MeasureModel::atomic({{CPoint{cplx(1, 0)}, 2.0}});
    auto s = berezin_norm(P, atom, 2.0, NormMode::sup);
    CHECK(s.finite);
    CHECK(s.value == doctest::Approx(2.0).epsilon(1e-8));
    // L^1 of 2 e^{-|z-1|^2} over C
    auto l1 = berezin_norm(P, atom, 2.0, NormMode::l1);
    CHECK(l1.value == doctest::Approx(2 * pi).epsilon(1e-6));

    auto leb = MeasureModel::lebesgue();
    CHECK(berezin_norm(P, leb, 1.0, NormMode::sup).value == doctest::Approx(2 * pi).epsilon(1e-8));
    CHECK_FALSE(berezin_norm(P, leb, 1.0, NormMode::l1).finite);
    CHECK(averaging_function_sup(P, leb, 1.0).value == doctest::Approx(pi).epsilon(1e-8));

    auto ball = MeasureModel::ball(CPoint{cplx(0, 0)}, 1.0);
    CHECK(averaging_function_sup(P, ball, 2.0).value == doctest::Approx(pi).epsilon(1e-6));
}

TEST_CASE("averaging sequences and their norms")
{
    Lattice lat = build_lattice(P, 1.0, 6.0);
    auto atom = MeasureModel::atomic({{CPoint{cplx(0, 0)}, 1.0}});
    auto seq = averaging_sequence(P, atom, lat, 1.0, {2.0});
    CHECK(seq.values.size() == lat.size());
    CHECK_FALSE(seq.infinite_tail);
    CHECK(seq.linf == doctest::Approx(1.0));
    double count = 0;
    for (const auto& z : lat.points) {
        count += z.norm() < 1.0;
    }
    CHECK(seq.l1 == doctest::Approx(count));
    CHECK(seq.ls.at(2.0) == doctest::Approx(std::sqrt(count)));

    auto leb = averaging_sequence(P, MeasureModel::lebesgue(), lat, 1.0, {2.0});
    CHECK(leb.infinite_tail);
    CHECK(leb.linf == doctest::Approx(pi));

    auto g = averaging_sequence(P, MeasureModel::gaussian(1.0, CPoint{cplx(0, 0)}), lat, 1.0);
    CHECK_FALSE(g.infinite_tail);
    CHECK(g.tail_bound < 1e-8);
}

TEST_CASE("admissibility equals the exponential Berezin closed form")
{
    // integral |K_w(z)|^2 e^{-alpha|w|^2} e^{-beta|w|^2} dV(w) = pi/(alpha+beta) exp(alpha^2|z|^2/(alpha+beta))
    auto g = MeasureModel::gaussian(1.0, CPoint{cplx(0, 0)});
    std::vector<CPoint> zs{CPoint{cplx(0, 0)}, CPoint{cplx(1, 1)}, CPoint{cplx(-2, 0.5)}};
    auto rep = admissibility(P, g, zs);
    CHECK(rep.finite);
    for (std::size_t i = 0; i < zs.size(); ++i) {
        double expect = pi / 2 * std::exp(zs[i].norm2() / 2);
        CHECK(rep.values[i] == doctest::Approx(expect).epsilon(1e-8));
    }
}

TEST_CASE("sigma integral of a constant against an atom")
{
    auto atom = MeasureModel::atomic({{CPoint{cplx(1, 1)}, 3.0}});
    auto one = EntireFn::constant(1);
    for (double q : {1.0, 2.0, 3.0}) {
        double expect = std::pow(3.0 * std::exp(-q * 2.0 / 2), 1.0 / q);
        CHECK(sigma_integral(P, atom, one, q) == doctest::Approx(expect).epsilon(1e-12));
    }
    CHECK(sigma_integral(P, atom, one, kInf) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("sigma integral against a Gaussian density")
{
    // |k_0|^q e^{-q|z|^2/2} = e^{-q|z|^2/2}; against e^{-|z|^2}: pi / (1 + q/2)
    auto g = MeasureModel::gaussian(1.0, CPoint{cplx(0, 0)});
    auto one = EntireFn::constant(1);
    CHECK(sigma_integral(P, g, one, 2.0) == doctest::Approx(std::sqrt(pi / 2)).epsilon(1e-8));
}

TEST_CASE("discretize preserves integrals of focused integrands")
{
    auto g = MeasureModel::gaussian(1.0, CPoint{cplx(0.5, 0)});
    Focus f;
    f.center = CPoint{cplx(0, 0)};
    f.extent = 0.5;
    f.rate = 1.0;
    auto d = discretize(P, g, f, 1);
    CHECK(total_mass(P, d) == doctest::Approx(pi).epsilon(1e-8));
}
