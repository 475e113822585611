#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "strata/builtin.hpp"
#include "strata/cover.hpp"
#include "strata/hodge.hpp"

using namespace strata;

namespace {

Mesh mesh_of(const char* name, double h) {
    return triangulate(FlatSurface::validate(*builtin::by_name(name)), h);
}

// exact d of a random vertex potential
Eigen::VectorXcd random_exact(const Mesh& M, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1, 1);
    Eigen::VectorXcd f(M.vertices.size());
    for (Eigen::Index v = 0; v < f.size(); ++v) f[v] = Complex(U(rng), U(rng));
    Eigen::VectorXcd vals(M.edges.size());
    for (size_t e = 0; e < M.edges.size(); ++e) vals[e] = f[M.edges[e].v1] - f[M.edges[e].v0];
    return vals;
}

} // namespace

TEST_CASE("covector reconstruction is exact for closed cochains") {
    Mesh M = mesh_of("octagon", 0.4);
    OneForm om = make_oneform(M, omega_cochain(M));
    CHECK(om.closedness_defect < 1e-12 * M.scale);
    CHECK(om.reconstruction_residual < 1e-12 * M.scale);
    for (Eigen::Index f = 0; f < om.alpha.size(); ++f) {
        CHECK(std::abs(om.alpha[f] - 1.0) < 1e-12);
        CHECK(std::abs(om.beta[f]) < 1e-12);
    }
    auto [p, q] = type_decompose(M, om);
    CHECK(hodge_norm(M, q) < 1e-10);
    CHECK(hodge_norm(M, om) == doctest::Approx(std::sqrt(M.area)).epsilon(1e-9));
}

TEST_CASE("hodge norm convention") {
    Mesh M = mesh_of("torus", 0.5);
    OneForm om = make_oneform(M, omega_cochain(M)); // dz
    CHECK(hodge_norm(M, om) == doctest::Approx(1.0));
    // a dz + b dzbar
    Complex a(0.3, -0.2), b(1.1, 0.7);
    OneForm mixed = add_forms(M, om, conjugate_form(M, om), a, b);
    CHECK(hodge_norm(M, mixed) == doctest::Approx(std::sqrt(std::norm(a) + std::norm(b))).epsilon(1e-12));
}

TEST_CASE("harmonic representative: recovery, exactness, periods") {
    Mesh M = mesh_of("torus", 0.25);
    Eigen::VectorXcd dx = omega_cochain(M).real().cast<Complex>();
    OneForm noisy = make_oneform(M, dx + random_exact(M, 7));
    OneForm h = harmonic_representative(M, noisy);
    // recovers the dx cochain: constant forms are harmonic on the flat torus
    CHECK((h.values - dx).cwiseAbs().maxCoeff() < 1e-9);

    OneForm exact = make_oneform(M, random_exact(M, 11));
    OneForm z = harmonic_representative(M, exact);
    CHECK(z.values.cwiseAbs().maxCoeff() < 1e-9);

    Mesh O = mesh_of("octagon", 0.3);
    HomologyBasis HO = homology_basis(O);
    OneForm c = make_oneform(O, HO.dual_cochains[1]);
    OneForm hc = harmonic_representative(O, c);
    for (size_t m = 0; m < HO.cycles.size(); ++m) {
        Complex before = cochain_period(O, c.values, HO.cycles[m]);
        Complex after = cochain_period(O, hc.values, HO.cycles[m]);
        CHECK(std::abs(before - after) < 1e-9); // periods preserved
    }
    CHECK(codifferential_norm(O, hc) < 1e-9);
    CHECK(max_face_sum(O, hc.values) < 1e-10);
}

TEST_CASE("type decomposition splits energy and is a projection") {
    Mesh M = mesh_of("octagon", 0.4);
    HarmonicBasis HB = harmonic_basis(M);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-1, 1);
    OneForm eta = scale_form(HB.forms[0], Complex(U(rng), U(rng)));
    for (size_t k = 1; k < HB.forms.size(); ++k)
        eta = add_forms(M, eta, HB.forms[k], 1.0, Complex(U(rng), U(rng)));
    auto [p, q] = type_decompose(M, eta);
    double n2 = hodge_norm(M, eta) * hodge_norm(M, eta);
    double s2 = hodge_norm(M, p) * hodge_norm(M, p) + hodge_norm(M, q) * hodge_norm(M, q);
    CHECK(n2 == doctest::Approx(s2).epsilon(1e-6));
    auto [pp, pq] = type_decompose(M, p);
    CHECK(hodge_norm(M, pq) == 0.0);
    CHECK(hodge_norm(M, add_forms(M, pp, p, 1.0, -1.0)) < 1e-12);
}

TEST_CASE("holomorphic basis on the flat torus is the dz line") {
    for (double h : {0.5, 0.25}) {
        Mesh M = mesh_of("torus", h);
        HolomorphicBasis B = holomorphic_basis(M);
        REQUIRE(B.forms.size() == 1);
        const OneForm& f = B.forms[0];
        for (Eigen::Index ff = 0; ff < f.alpha.size(); ++ff) {
            CHECK(std::abs(std::abs(f.alpha[ff]) - 1.0) < 1e-9); // |dz| after normalization
            CHECK(std::abs(f.beta[ff]) < 1e-9);
        }
        CHECK(hodge_norm(M, f) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("holomorphic basis on the octagon: rank two, orthonormal") {
    Mesh M = mesh_of("octagon", 0.3);
    HolomorphicBasis B = holomorphic_basis(M);
    REQUIRE(B.forms.size() == 2);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            Complex g = hodge_inner(M, B.forms[i], B.forms[j]);
            CHECK(std::abs(g - (i == j ? 1.0 : 0.0)) < 1e-8);
        }
        CHECK(hodge_norm(M, type_decompose(M, B.forms[i]).second) < 0.05);
        CHECK(max_face_sum(M, B.forms[i].values) < 1e-10);
    }
    Mesh P = mesh_of("pillowcase", 0.4);
    CHECK(holomorphic_basis(P).forms.empty());
}

TEST_CASE("anti-invariant bases on the pillowcase cover") {
    FlatSurface base = FlatSurface::validate(builtin::pillowcase());
    DoubleCover D = double_cover(base);
    CoverMesh C = lift_mesh(D, triangulate(base, 0.3));
    AntiInvariantBasis A = anti_invariant_basis(C);
    CHECK(A.base_genus == 0);
    CHECK(A.cover_genus == 1);
    REQUIRE(A.h10.size() == 1);
    REQUIRE(A.h01.size() == 1);
    // tau = -id on the torus: the whole dz line is anti-invariant
    const OneForm& f = A.h10_full[0];
    OneForm tf = tau_pullback_form(C, f);
    CHECK(hodge_norm(C.mesh, add_forms(C.mesh, tf, f, 1.0, 1.0)) < 1e-8);
    CHECK(hodge_norm(C.mesh, type_decompose(C.mesh, f).second) < 1e-8);
    // truncated members carry exactly one type
    CHECK(A.h10[0].beta.cwiseAbs().maxCoeff() == 0.0);
    CHECK(A.h01[0].alpha.cwiseAbs().maxCoeff() == 0.0);
    // isometry: pullback preserves the Hodge norm exactly
    CHECK(hodge_norm(C.mesh, tf) == doctest::Approx(hodge_norm(C.mesh, f)).epsilon(1e-12));
}

TEST_CASE("anti-invariant dimensions on the q1111 cover are (3,3)") {
    FlatSurface base = FlatSurface::validate(builtin::qtiled_1111());
    DoubleCover D = double_cover(base);
    CoverMesh C = lift_mesh(D, triangulate(base, 0.35));
    AntiInvariantBasis A = anti_invariant_basis(C);
    CHECK(A.cover_genus == 5);
    CHECK(A.base_genus == 2);
    CHECK(A.h10.size() == 3);
    CHECK(A.h01.size() == 3);
    for (const OneForm& f : A.h10_full) {
        OneForm tf = tau_pullback_form(C, f);
        CHECK(hodge_norm(C.mesh, add_forms(C.mesh, tf, f, 1.0, 1.0)) < 1e-8);
    }
}
