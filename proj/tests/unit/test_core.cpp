#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "fock/core.hpp"
#include "fock/entire.hpp"
#include "fock/errors.hpp"
#include "fock/norms.hpp"

using namespace fock;
using std::numbers::pi;

TEST_CASE("params reject nonpositive alpha and dimension")
{
    CHECK_THROWS_WITH_AS(FockParams(-1.0, 1), "alpha must be positive", PreconditionError);
    CHECK_THROWS_AS(FockParams(0.0, 1), PreconditionError);
    CHECK_THROWS_AS(FockParams(1.0, 0), PreconditionError);
    CHECK_NOTHROW(FockParams(0.5, 3));
}

TEST_CASE("point arithmetic and inner product")
{
    CPoint z{cplx(1, 2), cplx(0, -1)};
    CPoint w{cplx(3, 0), cplx(1, 1)};
    CHECK(z.norm2() == doctest::Approx(6.0));
    // <z, w> = 1+2i times 3 plus (-i) times (1 - i)
    cplx ip = inner(z, w);
    CHECK(ip.real() == doctest::Approx(2.0));
    CHECK(ip.imag() == doctest::Approx(5.0));
    CHECK(dist2(z, w) == doctest::Approx((z - w).norm2()));
    CHECK_THROWS_AS(z - CPoint{cplx(1, 0)}, DimensionMismatch);
}

TEST_CASE("kernel is exp(alpha <z, w>) and k_w has unit damped peak")
{
    FockParams P(0.7, 1);
    CPoint z{cplx(0.3, -1.1)}, w{cplx(-0.4, 0.9)};
    cplx expect = std::exp(0.7 * z[0] * std::conj(w[0]));
    cplx got = kernel(P, w, z);
    CHECK(std::abs(got - expect) < 1e-13 * std::abs(expect));
    double mod = std::abs(damped_normalized_kernel(P, w, z));
    CHECK(mod == doctest::Approx(std::exp(-0.7 * dist2(z, w) / 2)).epsilon(1e-13));
    CHECK(std::abs(damped_normalized_kernel(P, w, w)) == doctest::Approx(1.0));
}

TEST_CASE("log path keeps large kernels finite when damped")
{
    FockParams P(1.0, 1);
    CPoint w{cplx(40, 0)}, z{cplx(40, 0.5)};
    cplx d = damped_normalized_kernel(P, w, z);
    CHECK(std::isfinite(d.real()));
    CHECK(std::abs(d) == doctest::Approx(std::exp(-0.25 / 2)).epsilon(1e-12));
    LogComplex lk = log_kernel(P, w, z);
    CHECK(lk.log_abs == doctest::Approx(1600.0));
}

TEST_CASE("entire functions evaluate consistently")
{
    FockParams P(1.0, 1);
    auto m = EntireFn::monomial({1.0, cplx(0, 2), 0.5});
    CPoint z{cplx(0.7, -0.2)};
    cplx zz = z[0];
    cplx direct = 1.0 + cplx(0, 2) * zz + 0.5 * zz * zz;
    CHECK(std::abs(eval_entire(P, m, z) - direct) < 1e-14);
    cplx damped = direct * std::exp(-z.norm2() / 2);
    CHECK(std::abs(eval_damped(P, m, z) - damped) < 1e-14);

    auto c = EntireFn::combo({1.0, cplx(0, -1)}, {CPoint{cplx(1, 0)}, CPoint{cplx(0, 2)}});
    cplx k1 = std::exp(zz * 1.0 - 0.5), k2 = std::exp(zz * cplx(0, -2) - 2.0);
    CHECK(std::abs(eval_entire(P, c, z) - (k1 - cplx(0, 1) * k2)) < 1e-13);
    CHECK(c.bump_radius(1.0) == doctest::Approx(2.0));
    CHECK_THROWS_AS(EntireFn::combo({1.0}, {}), PreconditionError);
}

TEST_CASE("high-degree monomials evaluate without overflow")
{
    FockParams P(1.0, 1);
    std::vector<cplx> a(200, 0.0);
    a[199] = 1.0;
    auto f = EntireFn::monomial(a);
    CPoint z{cplx(std::sqrt(199.0), 0)};
    // |z|^k e^{-|z|^2/2} in log form
    double expect = std::exp(199 * std::log(std::sqrt(199.0)) - 199.0 / 2);
    cplx got = eval_damped(P, f, z);
    CHECK(std::abs(got) == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("batch evaluation matches pointwise evaluation")
{
    FockParams P(1.3, 1);
    auto f = EntireFn::combo({1.0, cplx(0.3, 0.4), -2.0},
                             {CPoint{cplx(0, 0)}, CPoint{cplx(1, -1)}, CPoint{cplx(-2, 0.5)}});
    std::vector<double> re, im;
    for (int i = 0; i < 37; ++i) {
        re.push_back(-3 + 0.17 * i);
        im.push_back(2 - 0.11 * i);
    }
    std::vector<cplx> out(re.size());
    eval_damped_plane(P, f, re, im, out);
    for (std::size_t i = 0; i < re.size(); ++i) {
        cplx ref = eval_damped(P, f, CPoint{cplx(re[i], im[i])});
        CHECK(std::abs(out[i] - ref) < 1e-13);
    }
}

TEST_CASE("unit kernels have norm one for every p")
{
    FockParams P(1.0, 1);
    for (cplx w : {cplx(0, 0), cplx(1, 1), cplx(0, 3)}) {
        auto k = EntireFn::kernel_at(CPoint{w});
        for (double p : {1.0, 2.0, 3.0}) {
            CHECK(norm_p(P, k, p) == doctest::Approx(1.0).epsilon(1e-8));
        }
        CHECK(norm_inf(P, k).value == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("F^2 norm of a monomial matches the Gamma closed form")
{
    // ||z^k||_2^2 = (alpha/pi) * pi * k! / alpha^k on C with weight e^{-alpha|z|^2}
    FockParams P(2.0, 1);
    for (int k : {0, 3, 7}) {
        std::vector<cplx> a(static_cast<std::size_t>(k + 1), 0.0);
        a.back() = 1.0;
        double expect = std::sqrt(std::tgamma(k + 1.0) / std::pow(2.0, k));
        CHECK(norm_p(P, EntireFn::monomial(a), 2.0) == doctest::Approx(expect).epsilon(1e-8));
    }
}

TEST_CASE("norm in two dimensions factorizes")
{
    FockParams P(1.0, 2);
    auto k = EntireFn::kernel_at(CPoint{cplx(0.5, 0), cplx(0, -0.5)});
    QuadratureOptions q;
    q.mc_rel_tol = 5e-2;
    CHECK(norm_p(P, k, 2.0, q) == doctest::Approx(1.0).epsilon(5e-2));
}

TEST_CASE("reproducing residual is tiny for random combinations")
{
    FockParams P(1.0, 1);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 3; ++trial) {
        std::vector<cplx> wts;
        std::vector<CPoint> ctr;
        for (int j = 0; j < 3; ++j) {
            wts.emplace_back(u(rng), u(rng));
            ctr.push_back(CPoint{cplx(u(rng), u(rng))});
        }
        auto f = EntireFn::combo(wts, ctr);
        CPoint z{cplx(u(rng), u(rng))};
        CHECK(std::abs(reproducing_residual(P, f, z)) < 1e-8);
    }
}

TEST_CASE("norm_p rejects invalid exponents")
{
    FockParams P(1.0, 1);
    auto k = EntireFn::kernel_at(CPoint{cplx(0, 0)});
    CHECK_THROWS_AS(norm_p(P, k, 0.5), PreconditionError);
    CHECK_THROWS_AS(norm_p(P, k, kInf), PreconditionError);
}
