#pragma once

#include <Eigen/Dense>

#include "strata/cover.hpp"
#include "strata/mesh.hpp"

namespace strata {

// Complex 1-form on a mesh: an edge cochain together with the per-face
// constant covector alpha dz + beta dzbar recovered by least squares. Pure
// type pieces produced by type_decompose carry covectors only.
struct OneForm {
    Eigen::VectorXcd values; // per edge; empty when has_cochain is false
    Eigen::VectorXcd alpha, beta;
    double closedness_defect = 0;
    double reconstruction_residual = 0;
    bool has_cochain = true;
};

OneForm make_oneform(const Mesh& M, Eigen::VectorXcd edge_values);
OneForm covector_form(const Mesh& M, Eigen::VectorXcd alpha, Eigen::VectorXcd beta);
OneForm conjugate_form(const Mesh& M, const OneForm& f);
OneForm scale_form(const OneForm& f, Complex s);
OneForm add_forms(const Mesh& M, const OneForm& a, const OneForm& b, Complex ca = 1.0, Complex cb = 1.0);

std::pair<OneForm, OneForm> type_decompose(const Mesh& M, const OneForm& f);

double hodge_norm(const Mesh& M, const OneForm& f);
Complex hodge_inner(const Mesh& M, const OneForm& f, const OneForm& g);

// Weighted codifferential (cotan weights); zero for harmonic cochains.
double codifferential_norm(const Mesh& M, const OneForm& f);

// c + df with the same periods and vanishing weighted codifferential.
OneForm harmonic_representative(const Mesh& M, const OneForm& c);

struct HarmonicBasis {
    std::vector<OneForm> forms;   // 2g harmonic cochains
    Eigen::MatrixXcd periods;     // periods over homology.cycles (identity by construction)
    Eigen::MatrixXcd gram;
    HomologyBasis homology;
};
HarmonicBasis harmonic_basis(const Mesh& M);

struct HolomorphicBasis {
    std::vector<OneForm> forms;   // g forms, Hodge-orthonormal, beta-part ~ 0
    Eigen::MatrixXcd periods;     // g x 2g periods over homology.cycles
    HarmonicBasis harmonic;
};
HolomorphicBasis holomorphic_basis(const Mesh& M);

OneForm tau_pullback_form(const CoverMesh& C, const OneForm& f);

// Bases of the -1 eigenspace of tau on cover cohomology, split by type.
// h10/h01 are the exact type truncations of the harmonic representatives in
// h10_full/h01_full (h01 members are the conjugates of h10 members).
struct AntiInvariantBasis {
    std::vector<OneForm> h10, h01;
    std::vector<OneForm> h10_full, h01_full;
    int base_genus = 0;
    int cover_genus = 0;
};
AntiInvariantBasis anti_invariant_basis(const CoverMesh& C);

std::string basis_to_json(const Mesh& M, const HolomorphicBasis& B);

} // namespace strata
