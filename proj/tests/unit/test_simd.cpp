#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "fock/core.hpp"
#include "fock/entire.hpp"
#include "fock/simd.hpp"

using namespace fock;

namespace {

std::vector<double> randoms(std::size_t n, double lo, double hi, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) {
        x = u(rng);
    }
    return v;
}

struct LevelGuard {
    simd::Level saved = simd::active_level();
    ~LevelGuard() { simd::set_level(saved); }
};

} // namespace

TEST_CASE("scalar kernels match brute force")
{
    std::mt19937_64 rng(1);
    auto px = randoms(13, -3, 3, rng), py = randoms(13, -3, 3, rng);
    auto cx = randoms(9, -3, 3, rng), cy = randoms(9, -3, 3, rng);
    std::vector<double> md(13);
    std::vector<int> cnt(13);
    simd::scalar::min_dist2(px, py, cx, cy, md);
    simd::scalar::count_within(px, py, cx, cy, 1.5, cnt);
    for (std::size_t i = 0; i < px.size(); ++i) {
        double best = INFINITY;
        int c = 0;
        for (std::size_t k = 0; k < cx.size(); ++k) {
            double d = (px[i] - cx[k]) * (px[i] - cx[k]) + (py[i] - cy[k]) * (py[i] - cy[k]);
            best = std::min(best, d);
            c += d < 1.5;
        }
        CHECK(md[i] == best);
        CHECK(cnt[i] == c);
    }
}

TEST_CASE("min_dist2 with no centers is infinite")
{
    std::vector<double> px{0.0}, py{0.0}, none, out(1);
    simd::min_dist2(px, py, none, none, out);
    CHECK(std::isinf(out[0]));
}

#if defined(FOCK_HAVE_AVX2)
TEST_CASE("avx2 kernels agree with the scalar reference")
{
    if (simd::detected_level() != simd::Level::avx2) {
        MESSAGE("CPU lacks AVX2; equivalence test skipped");
        return;
    }
    std::mt19937_64 rng(2);
    // odd lengths exercise the vector tails
    for (std::size_t n : {1u, 3u, 4u, 7u, 64u, 1001u}) {
        auto px = randoms(n, -5, 5, rng), py = randoms(n, -5, 5, rng);
        auto cx = randoms(n / 2 + 1, -5, 5, rng), cy = randoms(n / 2 + 1, -5, 5, rng);
        std::vector<double> a(n), b(n);
        simd::scalar::min_dist2(px, py, cx, cy, a);
        simd::avx2::min_dist2(px, py, cx, cy, b);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-14));
        }
        std::vector<int> ca(n), cb(n);
        simd::scalar::count_within(px, py, cx, cy, 2.0, ca);
        simd::avx2::count_within(px, py, cx, cy, 2.0, cb);
        CHECK(ca == cb);

        auto w = randoms(n, 0, 1, rng);
        double ga = simd::scalar::gauss_sum(px, py, w, 0.3, -0.2, 0.7);
        double gb = simd::avx2::gauss_sum(px, py, w, 0.3, -0.2, 0.7);
        CHECK(gb == doctest::Approx(ga).epsilon(1e-13));

        auto re = randoms(n, -1, 1, rng), imv = randoms(n, -1, 1, rng);
        simd::ComboView view{re, imv, px, py};
        for (double zx : {-2.0, 0.0, 3.5}) {
            auto sa = simd::scalar::combo_damped(view, 1.1, zx, 0.4);
            auto sb = simd::avx2::combo_damped(view, 1.1, zx, 0.4);
            CHECK(std::abs(sa - sb) <= 1e-12 * (1.0 + std::abs(sa)));
        }
    }
}

TEST_CASE("dispatch level changes results by rounding only")
{
    if (simd::detected_level() != simd::Level::avx2) {
        return;
    }
    LevelGuard guard;
    FockParams P(1.0, 1);
    auto f = EntireFn::combo({1.0, cplx(0, 1), -0.5},
                             {CPoint{cplx(0, 0)}, CPoint{cplx(1, 1)}, CPoint{cplx(-1, 2)}});
    std::vector<double> re{0.1, -0.5, 1.7, 2.2, -3.0}, im{0.0, 0.3, -1.2, 1.0, 0.5};
    std::vector<cplx> a(re.size()), b(re.size());
    simd::set_level(simd::Level::scalar);
    CHECK(simd::active_level() == simd::Level::scalar);
    eval_damped_plane(P, f, re, im, a);
    simd::set_level(simd::Level::avx2);
    eval_damped_plane(P, f, re, im, b);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(std::abs(a[i] - b[i]) < 1e-13);
    }
}
#endif

TEST_CASE("set_level clamps to the detected level")
{
    LevelGuard guard;
    simd::set_level(simd::Level::avx2);
    CHECK(static_cast<int>(simd::active_level()) <= static_cast<int>(simd::detected_level()));
    CHECK(simd::name(simd::Level::scalar) == "scalar");
}
