#include "doctest.h"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fock/lattice.hpp"
#include "fock/norms.hpp"
#include "fock/toeplitz.hpp"

using namespace fock;
using std::numbers::pi;

namespace {

const FockParams P(1.0, 1);

CPoint pt(cplx z) { return CPoint{z}; }

double basis_coeff(int k) { return std::sqrt(1.0 / std::tgamma(k + 1.0)); }

// <T e_k, e_j> for a ball of radius R at c, by nested Gauss-Kronrod on the disc
cplx ball_entry(cplx c, double R, int j, int k)
{
    using boost::math::quadrature::gauss_kronrod;
    auto part = [&](bool imag) {
        auto radial = [&](double r) {
            auto ang = [&](double th) {
                cplx w = c + std::polar(r, th);
                cplx v = std::pow(w, k) * std::pow(std::conj(w), j) * std::exp(-std::norm(w));
                return imag ? v.imag() : v.real();
            };
            return r * gauss_kronrod<double, 61>::integrate(ang, 0.0, 2 * pi, 8, 1e-13);
        };
        return gauss_kronrod<double, 61>::integrate(radial, 0.0, R, 10, 1e-13);
    };
    return cplx(part(false), part(true)) * basis_coeff(j) * basis_coeff(k);
}

} // namespace

TEST_CASE("Lebesgue acts as pi / alpha times identity")
{
    auto leb = MeasureModel::lebesgue();
    for (int k = 0; k <= 8; ++k) {
        std::vector<cplx> a(static_cast<std::size_t>(k + 1), 0.0);
        a.back() = 1.0;
        auto f = EntireFn::monomial(a);
        for (cplx z : {cplx(0.3, 0.2), cplx(-1, 1)}) {
            cplx got = apply(P, leb, f, pt(z));
            cplx want = pi * eval_entire(P, f, pt(z));
            CHECK(std::abs(got - want) < 1e-8 * std::max(1.0, std::abs(want)));
        }
    }
    FockParams P2(2.0, 1);
    auto k = EntireFn::kernel_at(pt(cplx(1, 0)));
    cplx z0 = apply(P2, leb, k, pt(cplx(0.5, 0.5)));
    CHECK(std::abs(z0 - pi / 2 * eval_entire(P2, k, pt(cplx(0.5, 0.5)))) < 1e-8);
}

TEST_CASE("Lebesgue matrix is pi times identity")
{
    auto M = matrix(P, MeasureModel::lebesgue(), 32);
    for (int j = 0; j < 32; ++j) {
        for (int k = 0; k < 32; ++k) {
            cplx want = j == k ? cplx(pi) : cplx(0.0);
            CHECK(std::abs(M(j, k) - want) < 1e-8);
        }
    }
}

TEST_CASE("centred Gaussian matrix is diagonal with pi alpha^k / (alpha + beta)^(k+1)")
{
    auto M = matrix(P, MeasureModel::gaussian(1.0, pt(0.0)), 32);
    for (int k = 0; k < 32; ++k) {
        CHECK(std::abs(M(k, k) - pi / std::pow(2.0, k + 1)) < 1e-8);
    }
    CHECK(std::abs(M(3, 5)) < 1e-8);
    CHECK(hilbert_norm(P, MeasureModel::gaussian(1.0, pt(0.0)), 32).value == doctest::Approx(pi / 2).epsilon(1e-6));
}

TEST_CASE("off-centre ball matrix matches independent quadrature")
{
    cplx c(0.6, -0.3);
    auto M = matrix(P, MeasureModel::ball(pt(c), 0.9), 8);
    for (auto [j, k] : {std::pair{0, 0}, {1, 0}, {2, 3}, {5, 1}, {7, 7}}) {
        cplx want = ball_entry(c, 0.9, j, k);
        CHECK(std::abs(M(j, k) - want) < 1e-9);
    }
    CHECK(M.hermitian_defect() < 1e-12);
    CHECK(M.min_eigenvalue() > -1e-12);
}

TEST_CASE("single atom gives a rank-one matrix of norm equal to its weight")
{
    for (cplx a : {cplx(0, 0), cplx(1, 0), cplx(1, 1)}) {
        auto mu = MeasureModel::atomic({{pt(a), 1.0}});
        auto M = matrix(P, mu, 48);
        auto sv = M.singular_values();
        CHECK(sv[1] < 1e-8);
        CHECK(sv[0] == doctest::Approx(1.0).epsilon(1e-5));
    }
    auto two = MeasureModel::atomic({{pt(0.0), 2.0}});
    CHECK(hilbert_norm(P, two, 32).value == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("trace of the truncation approaches the total mass")
{
    auto mu = MeasureModel::atomic({{pt(0.0), 1.0}, {pt(1.0), 2.0}});
    CHECK(trace(P, mu, 64).value == doctest::Approx(3.0).epsilon(1e-9));
    auto g = MeasureModel::gaussian(0.5, pt(0.0));
    CHECK(std::abs(trace(P, g, 64).value - 2 * pi) < 1e-6);
    auto leb = trace(P, MeasureModel::lebesgue(), 16);
    CHECK(leb.diverges);
}

TEST_CASE("Toeplitz of a Gaussian on a kernel has a closed-form image")
{
    auto g = MeasureModel::gaussian(1.0, pt(cplx(0.5, 0.5)));
    auto f = EntireFn::combo({1.0, cplx(0, 1)}, {pt(cplx(0.2, 0)), pt(cplx(-1, 1))});
    auto img = image(P, g, f);
    for (cplx z : {cplx(0, 0), cplx(1, -0.5)}) {
        cplx a = apply(P, g, f, pt(z));
        cplx b = eval_entire(P, img, pt(z));
        CHECK(std::abs(a - b) < 1e-8 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("Berezin from the operator equals the 2-Berezin transform")
{
    auto mu = MeasureModel::atomic({{pt(1.0), 1.0}});
    auto g = MeasureModel::gaussian(1.0, pt(0.0));
    for (cplx z : {cplx(0, 0), cplx(0.5, -1), cplx(2, 1)}) {
        CHECK(std::abs(berezin_from_operator(P, mu, pt(z)) - berezin(P, mu, 2.0, pt(z))) < 1e-6);
        CHECK(std::abs(berezin_from_operator(P, g, pt(z)) - berezin(P, g, 2.0, pt(z))) < 1e-6);
    }
}

TEST_CASE("operator norm lower bound never exceeds the Hilbert norm")
{
    auto mu = MeasureModel::gaussian(1.0, pt(0.0));
    Lattice lat = build_lattice(P, 1.0, 6.0);
    auto tests = default_tests(P, lat);
    QuadratureOptions q;
    q.rel_tol = 1e-4;
    auto est = op_norm_estimate(P, mu, 2.0, 2.0, tests, q);
    double h = hilbert_norm(P, mu, 32).value;
    CHECK(est.lower_bound <= h * (1 + 1e-4));
    CHECK(est.lower_bound >= h / 10);
    CHECK(est.witness >= 0);
}

TEST_CASE("fock_norm of unit kernels")
{
    auto k = EntireFn::kernel_at(pt(cplx(1, 2)));
    for (double p : {1.0, 2.0, kInf}) {
        CHECK(fock_norm(P, k, p) == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("matrix csv has one row per entry")
{
    auto M = matrix(P, MeasureModel::atomic({{pt(0.0), 1.0}}), 4);
    std::ostringstream os;
    write_matrix_csv(M, os);
    std::string s = os.str();
    auto rows = std::count(s.begin(), s.end(), '\n');
    CHECK((rows == 16 || rows == 17));
}
