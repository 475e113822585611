#pragma once

#include "strata/mesh.hpp"

namespace strata {

// Triangulated holonomy double cover, obtained by lifting a base mesh
// combinatorially: every base cell has two lifts and the deck involution tau
// swaps them, so equivariance is exact by construction.
struct CoverMesh {
    Mesh mesh; // translation mesh, chart of sheet 1 = -(chart of sheet 0)

    std::vector<int> base_vertex;
    std::vector<int> base_edge;
    std::vector<int> base_face;
    std::vector<int> face_sheet;

    std::vector<int> tau_vertex;
    std::vector<int> tau_edge;
    std::vector<int> tau_edge_sign; // canonical direction of e maps to +-(canonical of tau_edge)
    std::vector<int> tau_face;

    std::vector<bool> vertex_ramified;
};

CoverMesh lift_mesh(const DoubleCover& D, const Mesh& base);

// Structural validation of the tau tables; throws NonEquivariantMesh.
void check_equivariance(const CoverMesh& C);

// (tau^* eta) on edge cochains.
Eigen::VectorXcd tau_pullback(const CoverMesh& C, const Eigen::VectorXcd& edge_values);

} // namespace strata
