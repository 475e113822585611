#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "strata/surface.hpp"

namespace strata {

// Triangulation of a flat surface. There are no global coordinates: each face
// carries the chart positions of its three corners, and adjacent charts agree
// up to z -> z + c (or z -> -z + c across a -1 gluing, recorded in the edge
// flip). All metric quantities are read off the charts.
struct Mesh {
    struct Vertex {
        bool in_sigma = false; // zero of omega or marked point
        bool marked = false;
        int cone_order = 0;    // surface-convention order; 0 for regular points
        double angle = 0;      // total cone angle
    };
    struct Edge {
        int v0 = -1, v1 = -1;  // canonical direction v0 -> v1
        int flip = 1;          // -1 if the two incident charts differ by z -> -z + c
    };
    struct Face {
        std::array<int, 3> v;            // corner vertex ids, counterclockwise
        std::array<Complex, 3> chart;    // corner positions in the face chart
        std::array<int, 3> edge;         // slot i joins corner i to corner i+1
        std::array<int, 3> edge_sign;    // +1 if slot direction matches canonical
        std::array<int, 3> neighbor;     // face across slot i
        std::array<int, 3> nslot;        // matching slot in that face
    };

    std::vector<Vertex> vertices;
    std::vector<Edge> edges;
    std::vector<Face> faces;
    std::vector<double> edge_len;
    std::vector<int> sigma_vertices; // ascending
    bool translation = true;
    int genus = 0;
    double area = 0;
    double target_h = 0;
    double scale = 1; // typical coordinate magnitude, for tolerances

    Complex slot_vector(int f, int i) const {
        return faces[f].chart[(i + 1) % 3] - faces[f].chart[i];
    }
    double face_area(int f) const;
    Complex face_centroid(int f) const;
    double edge_length(int e) const { return edge_len[e]; }
    // slot of face f whose edge is e (-1 if absent)
    int slot_of_edge(int f, int e) const;
    double vertex_angle_sum(int v) const;
};

Mesh triangulate(const FlatSurface& S, double h);

// One global refinement sweep (longest-edge bisection until every edge is at
// most half the previous target). Lineage maps old cells to new ones so that
// cycles and cochains transfer exactly.
struct Refinement {
    Mesh mesh;
    // old edge -> ordered chain of new edges along the canonical direction
    std::vector<std::vector<int>> chains;
};
Refinement refine_uniform(const Mesh& M);

struct Cycle {
    std::vector<std::pair<int, int>> steps; // (edge, +-1)
};
Cycle transfer_cycle(const Cycle& c, const Refinement& r);

struct HomologyBasis {
    std::vector<Cycle> cycles;                    // 2g cycles
    std::vector<Eigen::VectorXcd> dual_cochains;  // closed cochains, periods(c_k, cycle_m) = delta
    Eigen::MatrixXd intersection;                 // intersection pairing of the cycles
};
HomologyBasis homology_basis(const Mesh& M);

std::vector<Cycle> relative_paths(const Mesh& M);

Complex cochain_period(const Mesh& M, const Eigen::VectorXcd& values, const Cycle& c);

// Edge holonomy cochain of a translation surface (the tautological form).
Eigen::VectorXcd omega_cochain(const Mesh& M);

double max_face_sum(const Mesh& M, const Eigen::VectorXcd& values);

std::string mesh_to_json(const Mesh& M);

} // namespace strata
