#include "doctest.h"

#include <algorithm>
#include <sstream>

#include "fock/errors.hpp"
#include "fock/lattice.hpp"

using namespace fock;

TEST_CASE("planar lattice packs and covers")
{
    FockParams P(1.0, 1);
    Lattice lat = build_lattice(P, 1.0, 6.0);
    REQUIRE(lat.size() > 50);
    CHECK(min_center_distance(lat) >= 0.5);
    CHECK(design_covering_radius(lat) < 0.5);
    auto samples = uniform_ball_samples(1, 5.0, 10000, 11);
    auto rep = verify_covering(lat, samples);
    CHECK(rep.covered);
    CHECK(rep.worst_gap < 0.5);
    for (const auto& z : lat.points) {
        CHECK(z.norm() <= 6.0 + 1e-12);
    }
}

TEST_CASE("lattice points are sorted by modulus")
{
    Lattice lat = build_lattice(FockParams(1.0, 1), 1.0, 5.0);
    for (std::size_t i = 1; i < lat.size(); ++i) {
        CHECK(lat.points[i - 1].norm() <= lat.points[i].norm() + 1e-12);
    }
}

TEST_CASE("lattice scales with r")
{
    Lattice a = build_lattice(FockParams(1.0, 1), 2.0, 12.0);
    CHECK(min_center_distance(a) >= 1.0);
    auto rep = verify_covering(a, uniform_ball_samples(1, 10.0, 4000, 3));
    CHECK(rep.worst_gap < 1.0);
}

TEST_CASE("multiplicity is finite and stable under refinement")
{
    Lattice lat = build_lattice(FockParams(1.0, 1), 1.0, 6.0);
    int coarse = covering_multiplicity(lat, 1.0, disc_grid_samples(4.0, 0.1));
    int fine = covering_multiplicity(lat, 1.0, disc_grid_samples(4.0, 0.02));
    CHECK(coarse >= 1);
    CHECK(fine == coarse);
    // a disc of radius 1 meets at most the grid points of a 2x2 box of step 0.6 (plus edges)
    CHECK(fine <= 16);
}

TEST_CASE("checkerboard lattice in C^2")
{
    FockParams P(1.0, 2);
    Lattice lat = build_lattice(P, 1.0, 4.0);
    CHECK(lat.n == 2);
    CHECK(min_center_distance(lat) >= 0.5);
    auto rep = verify_covering(lat, uniform_ball_samples(2, 3.0, 2000, 5));
    CHECK(rep.covered);
}

TEST_CASE("lattice preconditions")
{
    FockParams P(1.0, 1);
    CHECK_THROWS_AS(build_lattice(P, 0.0, 6.0), PreconditionError);
    CHECK_THROWS_AS(build_lattice(P, 1.0, 2.0), PreconditionError);
    CHECK_THROWS_AS(build_lattice(FockParams(1.0, 4), 1.0, 6.0), Unsupported);
    Lattice lat = build_lattice(P, 1.0, 6.0);
    CHECK_THROWS_AS(covering_multiplicity(lat, 1.0, {}), PreconditionError);
    CHECK_THROWS_AS(verify_covering(lat, {CPoint{cplx(5.9, 0)}}), PreconditionError);
}

TEST_CASE("lattice csv lists every point")
{
    Lattice lat = build_lattice(FockParams(1.0, 1), 1.0, 4.0);
    std::ostringstream os;
    write_lattice_csv(lat, os);
    std::string s = os.str();
    auto lines = static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
    CHECK((lines == lat.size() || lines == lat.size() + 1));
}
