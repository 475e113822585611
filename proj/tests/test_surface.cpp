#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "strata/builtin.hpp"
#include "strata/surface.hpp"

using namespace strata;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("square torus validates as a translation surface") {
    FlatSurface s = FlatSurface::validate(builtin::square_torus());
    CHECK(s.is_translation());
    CHECK(s.genus() == 1);
    CHECK(s.area() == doctest::Approx(1.0));
    CHECK(s.num_vertex_orbits() == 1);
    CHECK(s.orbit_angle(0) == doctest::Approx(2 * kPi));
    CHECK(s.cone_points().empty()); // unmarked regular orbit is not in Sigma
}

TEST_CASE("octagon: genus two, one cone of angle 6pi") {
    FlatSurface s = FlatSurface::validate(builtin::regular_octagon());
    CHECK(s.is_translation());
    CHECK(s.genus() == 2);
    CHECK(s.area() == doctest::Approx(2 * (1 + std::sqrt(2.0))));
    auto cones = s.cone_points();
    REQUIRE(cones.size() == 1);
    // angle-sum oracle: eight interior angles of 3pi/4 at the single orbit
    CHECK(cones[0].total_angle == doctest::Approx(8 * (3 * kPi / 4)));
    CHECK(cones[0].order == 2);
    CHECK(cones[0].order == 2 * s.genus() - 2);
    CHECK(s.stratum_signature() == std::vector<int>{2});
}

TEST_CASE("pillowcase: half-translation sphere with four pi cones") {
    FlatSurface s = FlatSurface::validate(builtin::pillowcase());
    CHECK_FALSE(s.is_translation());
    CHECK(s.genus() == 0);
    CHECK(s.area() == doctest::Approx(1.0));
    auto cones = s.cone_points();
    REQUIRE(cones.size() == 4);
    for (const auto& c : cones) {
        CHECK(c.total_angle == doctest::Approx(kPi));
        CHECK(c.order == -1);
    }
    // quadratic Gauss-Bonnet: sum of orders = 4g - 4
    int sum = 0;
    for (const auto& c : cones) sum += c.order;
    CHECK(sum == 4 * s.genus() - 4);
}

TEST_CASE("gauss-bonnet holds on every builtin surface") {
    for (const auto& name : builtin::names()) {
        FlatSurface s = FlatSurface::validate(*builtin::by_name(name));
        double defect = 0;
        for (int o = 0; o < s.num_vertex_orbits(); ++o) defect += s.orbit_angle(o) - 2 * kPi;
        CHECK(defect == doctest::Approx(2 * kPi * (2 * s.genus() - 2)).epsilon(1e-9));
    }
}

TEST_CASE("marked points promote to corners") {
    FlatSurface s = FlatSurface::validate(builtin::square_torus_marked());
    REQUIRE(s.cone_points().size() == 1);
    CHECK(s.cone_points()[0].is_marked);
    CHECK(s.cone_points()[0].order == 0);

    // on an edge: the edge and its partner split, total angle pi + pi
    SurfaceDesc d = builtin::square_torus();
    d.marked_points.push_back({0, {0.5, 0.0}});
    FlatSurface t = FlatSurface::validate(d);
    REQUIRE(t.cone_points().size() == 1);
    CHECK(t.cone_points()[0].is_marked);
    CHECK(t.cone_points()[0].total_angle == doctest::Approx(2 * kPi));
    CHECK(t.area() == doctest::Approx(1.0));
    CHECK(t.genus() == 1);

    // interior: kept as interior data
    FlatSurface u = FlatSurface::validate(builtin::square_torus_marked2());
    CHECK(u.interior_marked().size() == 1);
}

TEST_CASE("validation diagnostics") {
    SurfaceDesc bad = builtin::square_torus();
    bad.polygons[0].vertices[2] = {2.0, 1.0}; // break the side pairing
    CHECK_THROWS_AS(FlatSurface::validate(bad), Error);

    SurfaceDesc two;
    two.polygons.push_back(builtin::square_torus().polygons[0]);
    two.polygons.push_back(builtin::square_torus().polygons[0]);
    two.gluings = {{{0, 0}, {0, 2}, 1}, {{0, 1}, {0, 3}, 1}, {{1, 0}, {1, 2}, 1}, {{1, 1}, {1, 3}, 1}};
    CHECK_THROWS_WITH_AS(FlatSurface::validate(two), doctest::Contains("connected"), Error);

    SurfaceDesc pinched = builtin::square_torus();
    pinched.polygons[0].vertices = {{0, 0}, {1, 0}, {0, 1}, {1, 1}}; // self-crossing
    CHECK_THROWS_AS(FlatSurface::validate(pinched), Error);
}

TEST_CASE("pillowcase double cover is the flat torus of area two") {
    FlatSurface base = FlatSurface::validate(builtin::pillowcase());
    DoubleCover dc = double_cover(base);
    CHECK(dc.cover.is_translation());
    CHECK(dc.cover.genus() == 1);
    CHECK(dc.cover.area() == doctest::Approx(2.0));
    // four ramification points, all marked upstairs
    int marked = 0;
    for (const auto& c : dc.cover.cone_points())
        if (c.is_marked) ++marked;
    CHECK(marked == 4);
    int ram = 0;
    for (bool r : dc.base_orbit_ramified)
        if (r) ++ram;
    CHECK(ram == 4);
    for (size_t p = 0; p < dc.tau_polygon.size(); ++p) {
        CHECK(dc.tau_polygon[dc.tau_polygon[p]] == static_cast<int>(p));
        CHECK(dc.base_polygon[dc.tau_polygon[p]] == dc.base_polygon[p]);
    }
}

TEST_CASE("q1111 is a genus-two principal-stratum surface with cover genus five") {
    FlatSurface s = FlatSurface::validate(builtin::qtiled_1111());
    CHECK_FALSE(s.is_translation());
    CHECK(s.genus() == 2);
    CHECK(s.area() == doctest::Approx(6.0));
    auto cones = s.cone_points();
    REQUIRE(cones.size() == 4);
    for (const auto& c : cones) {
        CHECK(c.total_angle == doctest::Approx(3 * kPi));
        CHECK(c.order == 1);
    }
    DoubleCover dc = double_cover(s);
    // Euler characteristic oracle: chi_hat = 2*chi - (#odd cone points)
    CHECK(dc.cover.genus() == 5);
    CHECK(dc.cover.area() == doctest::Approx(12.0));
    for (const auto& c : dc.cover.cone_points()) {
        if (c.is_marked) continue;
        CHECK(c.total_angle == doctest::Approx(6 * kPi));
        CHECK(c.order == 2);
    }
}

TEST_CASE("double cover of a translation surface is rejected") {
    FlatSurface s = FlatSurface::validate(builtin::square_torus());
    CHECK_THROWS_AS(double_cover(s), Error);
}

TEST_CASE("squaring cover edge data reproduces the base edge data") {
    FlatSurface base = FlatSurface::validate(builtin::qtiled_1111());
    DoubleCover dc = double_cover(base);
    // cover edge vectors are +-(base edge vectors): their squares agree
    for (const Gluing& g : dc.cover.gluings()) {
        int bp = dc.base_polygon[g.from.polygon];
        Complex vc = dc.cover.polygons()[g.from.polygon].edge_vector(g.from.edge);
        Complex vb = base.polygons()[bp].edge_vector(g.from.edge);
        CHECK(std::abs(vc * vc - vb * vb) < 1e-12);
    }
}

TEST_CASE("scaling is homogeneous") {
    FlatSurface s = FlatSurface::validate(builtin::regular_octagon());
    FlatSurface t = s.scaled(2.0);
    CHECK(t.area() == doctest::Approx(4 * s.area()));
    CHECK(t.genus() == s.genus());
    CHECK(t.cone_points().size() == s.cone_points().size());
}

TEST_CASE("surface json round trip") {
    SurfaceDesc d = builtin::qtiled_1111();
    SurfaceDesc e = parse_surface_json(surface_to_json(d));
    FlatSurface a = FlatSurface::validate(d);
    FlatSurface b = FlatSurface::validate(e);
    CHECK(a.genus() == b.genus());
    CHECK(a.area() == doctest::Approx(b.area()));
    CHECK(a.num_vertex_orbits() == b.num_vertex_orbits());
    CHECK_THROWS_AS(parse_surface_json("{not json"), Error);
}
