#include "strata/cover.hpp"

#include <cmath>
#include <deque>
#include <map>
#include <numbers>

namespace strata {

namespace {

constexpr double kPi = std::numbers::pi;

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

} // namespace

CoverMesh lift_mesh(const DoubleCover& D, const Mesh& base) {
    (void)D; // the sheet bookkeeping is read off the base mesh edge flips
    bool any_flip = false;
    for (const auto& e : base.edges)
        if (e.flip == -1) any_flip = true;
    if (!any_flip) throw Error(Err::AlreadyTranslation, "base mesh has no -1 crossings");

    int F = static_cast<int>(base.faces.size());
    int E = static_cast<int>(base.edges.size());

    // cover vertices: orbits of (face corner, sheet)
    auto inst = [&](int f, int corner, int s) { return (f * 3 + corner) * 2 + s; };
    UnionFind uf(6 * F);
    for (int f = 0; f < F; ++f)
        for (int i = 0; i < 3; ++i) {
            int e = base.faces[f].edge[i];
            int g = base.faces[f].neighbor[i];
            int j = base.faces[f].nslot[i];
            int phi = base.edges[e].flip == -1 ? 1 : 0;
            for (int s = 0; s < 2; ++s) {
                // the two slots traverse the edge oppositely
                uf.unite(inst(f, i, s), inst(g, (j + 1) % 3, s ^ phi));
                uf.unite(inst(f, (i + 1) % 3, s), inst(g, j, s ^ phi));
            }
        }

    CoverMesh C;
    std::map<int, int> label;
    std::vector<int> corner_vertex(6 * F);
    for (int f = 0; f < F; ++f)
        for (int i = 0; i < 3; ++i)
            for (int s = 0; s < 2; ++s) {
                int r = uf.find(inst(f, i, s));
                auto [it, fresh] = label.try_emplace(r, static_cast<int>(label.size()));
                corner_vertex[inst(f, i, s)] = it->second;
                if (fresh) {
                    C.base_vertex.push_back(base.faces[f].v[i]);
                    C.tau_vertex.push_back(-1);
                }
            }
    int Vc = static_cast<int>(label.size());
    for (int f = 0; f < F; ++f)
        for (int i = 0; i < 3; ++i)
            C.tau_vertex[corner_vertex[inst(f, i, 0)]] = corner_vertex[inst(f, i, 1)];

    C.vertex_ramified.assign(Vc, false);
    for (int v = 0; v < Vc; ++v) C.vertex_ramified[v] = (C.tau_vertex[v] == v);

    std::vector<Mesh::Vertex> verts(Vc);
    for (int v = 0; v < Vc; ++v) {
        const Mesh::Vertex& bv = base.vertices[C.base_vertex[v]];
        Mesh::Vertex cv;
        cv.angle = bv.angle * (C.vertex_ramified[v] ? 2 : 1);
        bool conical = std::abs(cv.angle - 2 * kPi) > 1e-9;
        cv.in_sigma = bv.in_sigma;
        cv.marked = bv.in_sigma && !conical;
        if (conical) {
            int k = static_cast<int>(std::round(cv.angle / (2 * kPi))) - 1;
            cv.cone_order = k;
            if (k < 0) throw Error(Err::Internal, "cover cone angle below 2pi");
        }
        verts[v] = cv;
    }

    // cover edges: (base edge, sheet of the first incidence)
    struct EdgeInc {
        int f0, s0, f1, s1; // (face, slot) incidences in the base
        int phi;
    };
    std::vector<EdgeInc> einfo(E);
    {
        std::vector<int> seen(E, 0);
        for (int f = 0; f < F; ++f)
            for (int i = 0; i < 3; ++i) {
                int e = base.faces[f].edge[i];
                if (seen[e]++) continue;
                einfo[e] = {f, i, base.faces[f].neighbor[i], base.faces[f].nslot[i],
                            base.edges[e].flip == -1 ? 1 : 0};
            }
    }
    auto cover_edge_id = [&](int e, int s) { return 2 * e + s; };
    std::vector<Mesh::Edge> edges(2 * E);
    C.base_edge.assign(2 * E, -1);
    C.tau_edge.assign(2 * E, -1);
    C.tau_edge_sign.assign(2 * E, 1);
    for (int e = 0; e < E; ++e) {
        const EdgeInc& ei = einfo[e];
        for (int s = 0; s < 2; ++s) {
            // locate base v0/v1 among the corners of the first incidence
            int c_tail = base.faces[ei.f0].edge_sign[ei.s0] == 1 ? ei.s0 : (ei.s0 + 1) % 3;
            int c_head = base.faces[ei.f0].edge_sign[ei.s0] == 1 ? (ei.s0 + 1) % 3 : ei.s0;
            Mesh::Edge ce;
            ce.v0 = corner_vertex[inst(ei.f0, c_tail, s)];
            ce.v1 = corner_vertex[inst(ei.f0, c_head, s)];
            ce.flip = 1;
            edges[cover_edge_id(e, s)] = ce;
            C.base_edge[cover_edge_id(e, s)] = e;
            C.tau_edge[cover_edge_id(e, s)] = cover_edge_id(e, 1 - s);
        }
    }

    std::vector<Mesh::Face> faces(2 * F);
    C.base_face.assign(2 * F, -1);
    C.face_sheet.assign(2 * F, 0);
    C.tau_face.assign(2 * F, -1);
    for (int f = 0; f < F; ++f)
        for (int s = 0; s < 2; ++s) {
            int id = 2 * f + s;
            Mesh::Face cf;
            for (int i = 0; i < 3; ++i) {
                cf.v[i] = corner_vertex[inst(f, i, s)];
                cf.chart[i] = (s == 0) ? base.faces[f].chart[i] : -base.faces[f].chart[i];
            }
            for (int i = 0; i < 3; ++i) {
                int e = base.faces[f].edge[i];
                const EdgeInc& ei = einfo[e];
                int sheet_at_first = (f == ei.f0 && i == ei.s0) ? s : (s ^ ei.phi);
                cf.edge[i] = cover_edge_id(e, sheet_at_first);
                // slot direction vs cover-canonical: canonical follows the base
                // canonical direction, so the base edge_sign carries over
                cf.edge_sign[i] = base.faces[f].edge_sign[i];
            }
            cf.neighbor = {-1, -1, -1};
            cf.nslot = {-1, -1, -1};
            faces[id] = cf;
            C.base_face[id] = f;
            C.face_sheet[id] = s;
            C.tau_face[id] = 2 * f + (1 - s);
        }

    // orientation of sheet-1 faces: negating the chart of a ccw triangle keeps
    // it ccw, so the corner order is unchanged.

    // assemble: neighbor tables, lengths, genus, checks
    Mesh M;
    M.vertices = std::move(verts);
    M.edges = std::move(edges);
    M.faces = std::move(faces);
    std::vector<std::vector<std::pair<int, int>>> incid(M.edges.size());
    for (size_t f = 0; f < M.faces.size(); ++f)
        for (int i = 0; i < 3; ++i) incid[M.faces[f].edge[i]].push_back({static_cast<int>(f), i});
    M.edge_len.assign(M.edges.size(), 0.0);
    for (size_t e = 0; e < M.edges.size(); ++e) {
        if (incid[e].size() != 2) throw Error(Err::Internal, "cover edge lacks two incidences");
        auto [f0, s0] = incid[e][0];
        auto [f1, s1] = incid[e][1];
        M.faces[f0].neighbor[s0] = f1;
        M.faces[f0].nslot[s0] = s1;
        M.faces[f1].neighbor[s1] = f0;
        M.faces[f1].nslot[s1] = s0;
        M.edge_len[e] = std::abs(M.faces[f0].chart[(s0 + 1) % 3] - M.faces[f0].chart[s0]);
    }
    M.translation = true;
    M.area = 0;
    M.scale = 1e-30;
    for (size_t f = 0; f < M.faces.size(); ++f) {
        Complex u = M.faces[f].chart[1] - M.faces[f].chart[0];
        Complex v = M.faces[f].chart[2] - M.faces[f].chart[0];
        double a = 0.5 * (u.real() * v.imag() - u.imag() * v.real());
        if (a <= 0) throw Error(Err::Internal, "inverted cover face");
        M.area += a;
        for (auto c : M.faces[f].chart) M.scale = std::max(M.scale, std::abs(c));
    }
    int chi = Vc - static_cast<int>(M.edges.size()) + static_cast<int>(M.faces.size());
    M.genus = (2 - chi) / 2;
    if (2 - chi != 2 * M.genus) throw Error(Err::Internal, "odd Euler characteristic upstairs");
    for (int v = 0; v < Vc; ++v)
        if (M.vertices[v].in_sigma) M.sigma_vertices.push_back(v);
    M.target_h = base.target_h;

    // connectivity: trivial holonomy would give two disjoint copies
    {
        std::vector<bool> seen(M.faces.size(), false);
        std::deque<int> q{0};
        seen[0] = true;
        size_t count = 1;
        while (!q.empty()) {
            int f = q.front();
            q.pop_front();
            for (int i = 0; i < 3; ++i) {
                int g = M.faces[f].neighbor[i];
                if (!seen[g]) {
                    seen[g] = true;
                    ++count;
                    q.push_back(g);
                }
            }
        }
        if (count != M.faces.size())
            throw Error(Err::Disconnected, "double cover is disconnected (trivial holonomy)");
    }

    C.mesh = std::move(M);
    check_equivariance(C);
    return C;
}

void check_equivariance(const CoverMesh& C) {
    const Mesh& M = C.mesh;
    auto fail = [](const std::string& m) { throw Error(Err::NonEquivariantMesh, m); };
    if (C.tau_face.size() != M.faces.size() || C.tau_edge.size() != M.edges.size() ||
        C.tau_vertex.size() != M.vertices.size())
        fail("tau tables have wrong sizes");
    for (size_t v = 0; v < M.vertices.size(); ++v)
        if (C.tau_vertex[C.tau_vertex[v]] != static_cast<int>(v)) fail("tau is not an involution on vertices");
    for (size_t e = 0; e < M.edges.size(); ++e) {
        int te = C.tau_edge[e];
        if (C.tau_edge[te] != static_cast<int>(e)) fail("tau is not an involution on edges");
        int s = C.tau_edge_sign[e];
        int v0 = s == 1 ? M.edges[te].v0 : M.edges[te].v1;
        int v1 = s == 1 ? M.edges[te].v1 : M.edges[te].v0;
        if (C.tau_vertex[M.edges[e].v0] != v0 || C.tau_vertex[M.edges[e].v1] != v1)
            fail("tau edge map disagrees with tau vertex map");
        if (C.base_edge[e] != C.base_edge[te]) fail("tau does not preserve fibers of edges");
    }
    for (size_t f = 0; f < M.faces.size(); ++f) {
        int tf = C.tau_face[f];
        if (C.tau_face[tf] != static_cast<int>(f)) fail("tau is not an involution on faces");
        if (C.base_face[f] != C.base_face[tf]) fail("tau does not preserve fibers of faces");
        for (int i = 0; i < 3; ++i) {
            if (C.tau_vertex[M.faces[f].v[i]] != M.faces[tf].v[i]) fail("tau face corners disagree");
            // charts must be related by z -> -z + c: slot vectors negate
            Complex a = M.faces[f].chart[(i + 1) % 3] - M.faces[f].chart[i];
            Complex b = M.faces[tf].chart[(i + 1) % 3] - M.faces[tf].chart[i];
            if (std::abs(a + b) > 1e-9 * std::max(1.0, M.scale)) fail("tau does not negate the charts");
            if (C.tau_edge[M.faces[f].edge[i]] != M.faces[tf].edge[i]) fail("tau face edges disagree");
        }
    }
}

Eigen::VectorXcd tau_pullback(const CoverMesh& C, const Eigen::VectorXcd& edge_values) {
    Eigen::VectorXcd out(edge_values.size());
    for (int e = 0; e < edge_values.size(); ++e)
        out[e] = double(C.tau_edge_sign[e]) * edge_values[C.tau_edge[e]];
    return out;
}

} // namespace strata
