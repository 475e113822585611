#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <set>

#include <Eigen/Dense>

#include "strata/builtin.hpp"
#include "strata/cover.hpp"
#include "strata/mesh.hpp"

using namespace strata;

namespace {
constexpr double kPi = std::numbers::pi;

Mesh mesh_of(const char* name, double h) {
    return triangulate(FlatSurface::validate(*builtin::by_name(name)), h);
}

double max_edge(const Mesh& M) {
    double m = 0;
    for (size_t e = 0; e < M.edges.size(); ++e) m = std::max(m, M.edge_length(static_cast<int>(e)));
    return m;
}
} // namespace

TEST_CASE("torus mesh at h = 0.5") {
    Mesh M = mesh_of("torus", 0.5);
    CHECK(M.faces.size() >= 8);
    CHECK(M.translation);
    CHECK(M.genus == 1);
    CHECK(M.area == doctest::Approx(1.0));
    CHECK(max_edge(M) <= 0.5 + 1e-12);
    // closed-surface complex: V - E + F = 2 - 2g
    int chi = static_cast<int>(M.vertices.size()) - static_cast<int>(M.edges.size()) +
              static_cast<int>(M.faces.size());
    CHECK(chi == 2 - 2 * M.genus);
}

TEST_CASE("octagon mesh grades toward the cone and keeps the angle") {
    Mesh M = mesh_of("octagon", 0.2);
    int cone = -1;
    for (size_t v = 0; v < M.vertices.size(); ++v)
        if (M.vertices[v].cone_order == 2) cone = static_cast<int>(v);
    REQUIRE(cone >= 0);
    CHECK(M.vertex_angle_sum(cone) == doctest::Approx(6 * kPi).epsilon(1e-9));
    // graded sizing: edges touching the cone are shorter than h
    double near = 1e9;
    for (const auto& e : M.edges)
        if (e.v0 == cone || e.v1 == cone)
            near = std::min(near, M.edge_length(&e - M.edges.data()));
    CHECK(near < 0.2 / 2);
    CHECK(M.area == doctest::Approx(2 * (1 + std::sqrt(2.0))));
}

TEST_CASE("oversized h clamps to the shortest polygon edge") {
    Mesh M = mesh_of("torus", 100.0);
    CHECK(max_edge(M) <= 1.0 + 1e-12);
    CHECK(M.genus == 1);
    CHECK(M.area == doctest::Approx(1.0));
}

TEST_CASE("half-translation meshes carry flips, translation meshes do not") {
    Mesh P = mesh_of("pillowcase", 0.5);
    CHECK_FALSE(P.translation);
    CHECK(P.genus == 0);
    CHECK_THROWS_AS(omega_cochain(P), Error);
    Mesh T = mesh_of("torus", 0.5);
    CHECK(T.translation);
}

TEST_CASE("homology basis: torus and octagon") {
    Mesh T = mesh_of("torus", 0.5);
    HomologyBasis HT = homology_basis(T);
    REQUIRE(HT.cycles.size() == 2);
    CHECK(std::abs(HT.intersection(0, 1)) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(HT.intersection(0, 0) == doctest::Approx(0.0).epsilon(1e-6));

    Mesh O = mesh_of("octagon", 0.5);
    HomologyBasis HO = homology_basis(O);
    REQUIRE(HO.cycles.size() == 4);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(HO.intersection);
    CHECK(lu.rank() == 4);
    CHECK(std::abs(HO.intersection.determinant()) > 0.5);
    // integrality of the pairing
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(std::abs(HO.intersection(i, j) - std::round(HO.intersection(i, j))) < 1e-6);

    Mesh P = mesh_of("pillowcase", 0.5);
    CHECK(homology_basis(P).cycles.empty());
}

TEST_CASE("relative paths connect the base Sigma point to the others") {
    Mesh M2 = mesh_of("torus-marked2", 0.5);
    CHECK(relative_paths(M2).size() == 1);
    Mesh O = mesh_of("octagon", 0.5);
    CHECK(relative_paths(O).empty()); // |Sigma| = 1
}

TEST_CASE("omega cochain: periods span the torus lattice and are h-independent") {
    for (double h : {0.5, 0.25}) {
        Mesh M = mesh_of("torus", h);
        auto om = omega_cochain(M);
        CHECK(max_face_sum(M, om) < 1e-12);
        HomologyBasis H = homology_basis(M);
        Complex p0 = cochain_period(M, om, H.cycles[0]);
        Complex p1 = cochain_period(M, om, H.cycles[1]);
        // basis of the lattice Z + Zi: Gaussian-integer periods, unit determinant
        for (Complex p : {p0, p1}) {
            CHECK(std::abs(p.real() - std::round(p.real())) < 1e-9);
            CHECK(std::abs(p.imag() - std::round(p.imag())) < 1e-9);
        }
        double det = p0.real() * p1.imag() - p0.imag() * p1.real();
        CHECK(std::abs(std::abs(det) - 1.0) < 1e-9);
    }
}

TEST_CASE("uniform refinement preserves area, genus, angles, and periods") {
    Mesh M = mesh_of("octagon", 0.5);
    HomologyBasis H = homology_basis(M);
    auto om = omega_cochain(M);
    Refinement R = refine_uniform(M);
    CHECK(R.mesh.genus == M.genus);
    CHECK(R.mesh.area == doctest::Approx(M.area).epsilon(1e-12));
    CHECK(max_edge(R.mesh) <= max_edge(M) / 2 + 1e-9);
    auto om2 = omega_cochain(R.mesh);
    for (size_t k = 0; k < H.cycles.size(); ++k) {
        Cycle fine = transfer_cycle(H.cycles[k], R);
        Complex a = cochain_period(M, om, H.cycles[k]);
        Complex b = cochain_period(R.mesh, om2, fine);
        CHECK(std::abs(a - b) < 1e-12);
    }
    int cone_old = -1, cone_new = -1;
    for (size_t v = 0; v < M.vertices.size(); ++v)
        if (M.vertices[v].cone_order == 2) cone_old = static_cast<int>(v);
    for (size_t v = 0; v < R.mesh.vertices.size(); ++v)
        if (R.mesh.vertices[v].cone_order == 2) cone_new = static_cast<int>(v);
    CHECK(R.mesh.vertex_angle_sum(cone_new) == doctest::Approx(M.vertex_angle_sum(cone_old)));
}

TEST_CASE("pillowcase cover mesh: torus of area two with exact involution") {
    FlatSurface base = FlatSurface::validate(builtin::pillowcase());
    DoubleCover D = double_cover(base);
    Mesh BM = triangulate(base, 0.3);
    CoverMesh C = lift_mesh(D, BM);
    CHECK(C.mesh.translation);
    CHECK(C.mesh.genus == 1);
    CHECK(C.mesh.area == doctest::Approx(2.0));
    CHECK(C.mesh.faces.size() == 2 * BM.faces.size());
    int ram = 0;
    for (bool r : C.vertex_ramified)
        if (r) ++ram;
    CHECK(ram == 4);
    // tau negates the tautological cochain
    auto om = omega_cochain(C.mesh);
    auto tom = tau_pullback(C, om);
    CHECK((om + tom).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("q1111 cover mesh has genus five") {
    FlatSurface base = FlatSurface::validate(builtin::qtiled_1111());
    DoubleCover D = double_cover(base);
    Mesh BM = triangulate(base, 0.5);
    CoverMesh C = lift_mesh(D, BM);
    CHECK(C.mesh.genus == 5);
    CHECK(C.mesh.area == doctest::Approx(12.0));
    int cones = 0;
    for (const auto& v : C.mesh.vertices)
        if (v.cone_order == 2) ++cones;
    CHECK(cones == 4);
    check_equivariance(C); // throws on failure
}
