#include "strata/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numbers>
#include <queue>

#include <json.hpp>

namespace strata {

namespace {

constexpr double kPi = std::numbers::pi;

double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }

// Incremental mesh under edge bisection. Faces are replaced in place; edges
// that get split are retired and their halves recorded for lineage.
struct MeshBuilder {
    struct BEdge {
        int v0, v1;
        int flip;
        bool alive = true;
    };
    struct BFace {
        std::array<int, 3> v;
        std::array<Complex, 3> chart;
        std::array<int, 3> edge;
        std::array<int, 3> edge_sign;
    };

    std::vector<Mesh::Vertex> vertices;
    std::vector<BEdge> edges;
    std::vector<BFace> faces;
    std::vector<std::vector<std::pair<int, int>>> incid; // edge -> (face, slot)
    std::vector<std::array<int, 2>> children;            // edge -> halves (builder ids)
    std::vector<double> vdist;                            // distance-to-cone field

    int add_vertex(const Mesh::Vertex& v) {
        vertices.push_back(v);
        vdist.push_back(std::numeric_limits<double>::infinity());
        return static_cast<int>(vertices.size()) - 1;
    }
    int add_edge(int v0, int v1, int flip) {
        edges.push_back({v0, v1, flip});
        incid.emplace_back();
        children.push_back({-1, -1});
        return static_cast<int>(edges.size()) - 1;
    }
    int add_face(const BFace& f) {
        faces.push_back(f);
        int id = static_cast<int>(faces.size()) - 1;
        for (int i = 0; i < 3; ++i) incid[f.edge[i]].push_back({id, i});
        return id;
    }
    void set_face(int id, const BFace& f) {
        faces[id] = f;
        for (int i = 0; i < 3; ++i) incid[f.edge[i]].push_back({id, i});
    }
    void drop_incidence(int e, int face) {
        auto& v = incid[e];
        v.erase(std::remove_if(v.begin(), v.end(), [&](auto p) { return p.first == face; }), v.end());
    }
    double edge_len(int e) const {
        const auto& inc = incid[e];
        const BFace& f = faces[inc[0].first];
        int i = inc[0].second;
        return std::abs(f.chart[(i + 1) % 3] - f.chart[i]);
    }

    void split_edge(int e) {
        auto inc = incid[e]; // copy
        if (inc.size() != 2 || inc[0].first == inc[1].first)
            throw Error(Err::Internal, "edge without two distinct incident faces");
        const BEdge old = edges[e];
        Mesh::Vertex mv; // regular midpoint
        mv.angle = 2 * kPi;
        int m = add_vertex(mv);
        vdist[m] = std::min(vdist[old.v0], vdist[old.v1]) + 0.5 * edge_len(e);
        int c0 = add_edge(old.v0, m, old.flip);
        int c1 = add_edge(m, old.v1, old.flip);
        children[e] = {c0, c1};
        edges[e].alive = false;
        incid[e].clear();

        for (auto [fid, slot] : inc) {
            BFace f = faces[fid];
            int s = f.edge_sign[slot];
            int i = slot, j = (slot + 1) % 3, k = (slot + 2) % 3;
            Complex pm = 0.5 * (f.chart[i] + f.chart[j]);
            int eam = (s == 1) ? c0 : c1;
            int emb = (s == 1) ? c1 : c0;
            int ecm = add_edge(m, f.v[k], 1);
            // retire old incidences of the two surviving slots
            drop_incidence(f.edge[j], fid);
            drop_incidence(f.edge[k], fid);
            BFace f1; // (A, m, C)
            f1.v = {f.v[i], m, f.v[k]};
            f1.chart = {f.chart[i], pm, f.chart[k]};
            f1.edge = {eam, ecm, f.edge[k]};
            f1.edge_sign = {s, 1, f.edge_sign[k]};
            BFace f2; // (m, B, C)
            f2.v = {m, f.v[j], f.v[k]};
            f2.chart = {pm, f.chart[j], f.chart[k]};
            f2.edge = {emb, f.edge[j], ecm};
            f2.edge_sign = {s, f.edge_sign[j], -1};
            set_face(fid, f1);
            add_face(f2);
        }
    }

    // Longest-edge bisection until every face satisfies its size target.
    template <class SizeFn>
    void refine(SizeFn size_of) {
        auto longest_slot = [&](int f) {
            int best = 0;
            double bl = -1;
            for (int i = 0; i < 3; ++i) {
                double l = std::abs(faces[f].chart[(i + 1) % 3] - faces[f].chart[i]);
                if (l > bl * (1 + 1e-12)) {
                    bl = l;
                    best = i;
                }
            }
            return best;
        };
        long splits = 0;
        bool changed = true;
        while (changed) {
            changed = false;
            for (size_t f = 0; f < faces.size(); ++f) {
                double target = size_of(static_cast<int>(f));
                int ls = longest_slot(static_cast<int>(f));
                double ll = std::abs(faces[f].chart[(ls + 1) % 3] - faces[f].chart[ls]);
                if (ll <= target) continue;
                int e = faces[f].edge[ls];
                for (int guard = 0; guard < 1000; ++guard) {
                    bool advanced = false;
                    for (auto [g, gi] : incid[e]) {
                        int gl = longest_slot(g);
                        int ge = faces[g].edge[gl];
                        if (ge != e && edge_len(ge) > edge_len(e) * (1 + 1e-12)) {
                            e = ge;
                            advanced = true;
                            break;
                        }
                    }
                    if (!advanced) break;
                }
                split_edge(e);
                changed = true;
                if (++splits > 20'000'000) throw Error(Err::Internal, "refinement did not terminate");
            }
        }
    }

    void seed_cone_distances() {
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
        for (size_t v = 0; v < vertices.size(); ++v) {
            bool conical = std::abs(vertices[v].angle - 2 * kPi) > 1e-9;
            vdist[v] = conical ? 0.0 : std::numeric_limits<double>::infinity();
            if (conical) pq.push({0.0, static_cast<int>(v)});
        }
        // adjacency from live edges
        std::vector<std::vector<std::pair<int, double>>> adj(vertices.size());
        for (size_t e = 0; e < edges.size(); ++e) {
            if (!edges[e].alive) continue;
            double l = edge_len(static_cast<int>(e));
            adj[edges[e].v0].push_back({edges[e].v1, l});
            adj[edges[e].v1].push_back({edges[e].v0, l});
        }
        while (!pq.empty()) {
            auto [d, v] = pq.top();
            pq.pop();
            if (d > vdist[v]) continue;
            for (auto [w, l] : adj[v])
                if (vdist[v] + l < vdist[w]) {
                    vdist[w] = vdist[v] + l;
                    pq.push({vdist[w], w});
                }
        }
    }

    Mesh finalize(const FlatSurface* S, double h, std::vector<std::vector<int>>* chains_out);
};

Mesh MeshBuilder::finalize(const FlatSurface* S, double h, std::vector<std::vector<int>>* chains_out) {
    Mesh M;
    M.vertices = vertices;
    std::vector<int> emap(edges.size(), -1);
    for (size_t e = 0; e < edges.size(); ++e) {
        if (!edges[e].alive) continue;
        emap[e] = static_cast<int>(M.edges.size());
        M.edges.push_back({edges[e].v0, edges[e].v1, edges[e].flip});
    }
    M.faces.resize(faces.size());
    for (size_t f = 0; f < faces.size(); ++f) {
        Mesh::Face& out = M.faces[f];
        out.v = faces[f].v;
        out.chart = faces[f].chart;
        for (int i = 0; i < 3; ++i) {
            out.edge[i] = emap[faces[f].edge[i]];
            out.edge_sign[i] = faces[f].edge_sign[i];
            if (out.edge[i] < 0) throw Error(Err::Internal, "face references a retired edge");
        }
        out.neighbor = {-1, -1, -1};
        out.nslot = {-1, -1, -1};
    }
    M.edge_len.assign(M.edges.size(), 0.0);
    for (size_t e = 0; e < edges.size(); ++e) {
        if (!edges[e].alive) continue;
        const auto& inc = incid[e];
        if (inc.size() != 2) throw Error(Err::Internal, "mesh is not a closed surface complex");
        auto [f0, s0] = inc[0];
        auto [f1, s1] = inc[1];
        M.faces[f0].neighbor[s0] = f1;
        M.faces[f0].nslot[s0] = s1;
        M.faces[f1].neighbor[s1] = f0;
        M.faces[f1].nslot[s1] = s0;
        double l0 = std::abs(M.faces[f0].chart[(s0 + 1) % 3] - M.faces[f0].chart[s0]);
        double l1 = std::abs(M.faces[f1].chart[(s1 + 1) % 3] - M.faces[f1].chart[s1]);
        if (std::abs(l0 - l1) > 1e-9 * std::max(1.0, l0))
            throw Error(Err::Internal, "incident charts disagree on an edge length");
        M.edge_len[emap[e]] = l0;
    }

    M.translation = true;
    for (const auto& e : M.edges)
        if (e.flip == -1) M.translation = false;
    M.area = 0;
    M.scale = 1e-30;
    for (size_t f = 0; f < M.faces.size(); ++f) {
        double a = 0.5 * cross(M.faces[f].chart[1] - M.faces[f].chart[0],
                               M.faces[f].chart[2] - M.faces[f].chart[0]);
        if (a <= 0) throw Error(Err::Internal, "inverted face");
        M.area += a;
        for (auto c : M.faces[f].chart) M.scale = std::max(M.scale, std::abs(c));
    }
    int V = static_cast<int>(M.vertices.size());
    int E = static_cast<int>(M.edges.size());
    int F = static_cast<int>(M.faces.size());
    int chi = V - E + F;
    M.genus = (2 - chi) / 2;
    if (2 - chi != 2 * M.genus) throw Error(Err::Internal, "odd Euler characteristic in mesh");
    if (S && M.genus != S->genus()) throw Error(Err::Internal, "mesh genus disagrees with surface");
    for (int v = 0; v < V; ++v)
        if (M.vertices[v].in_sigma) M.sigma_vertices.push_back(v);
    M.target_h = h;

    if (chains_out) {
        chains_out->assign(edges.size(), {});
        // resolve lineage to live edges, in canonical order
        std::vector<std::vector<int>>& chains = *chains_out;
        for (int e = static_cast<int>(edges.size()) - 1; e >= 0; --e) {
            if (edges[e].alive) {
                chains[e] = {emap[e]};
            } else {
                auto [c0, c1] = children[e];
                chains[e] = chains[c0];
                chains[e].insert(chains[e].end(), chains[c1].begin(), chains[c1].end());
            }
        }
    }
    return M;
}

// Triangulate one polygon: fan from the centroid when star-shaped, otherwise
// ear clipping. Returns local triangles as corner-index triples where index n
// denotes the centroid.
std::vector<std::array<int, 3>> polygon_triangles(const Polygon& poly, bool& used_center) {
    int n = poly.size();
    Complex c = 0;
    for (auto v : poly.vertices) c += v;
    c /= static_cast<double>(n);
    used_center = true;
    for (int i = 0; i < n; ++i) {
        Complex a = poly.vertices[i], b = poly.vertices[(i + 1) % n];
        if (cross(a - c, b - c) <= 1e-12 * poly.diameter() * poly.diameter()) {
            used_center = false;
            break;
        }
    }
    std::vector<std::array<int, 3>> tris;
    if (used_center) {
        for (int i = 0; i < n; ++i) tris.push_back({n, i, (i + 1) % n});
        return tris;
    }
    // ear clipping
    std::vector<int> ring(n);
    for (int i = 0; i < n; ++i) ring[i] = i;
    auto is_ear = [&](int a, int b, int cc, const std::vector<int>& r) {
        Complex pa = poly.vertices[a], pb = poly.vertices[b], pc = poly.vertices[cc];
        if (cross(pb - pa, pc - pa) <= 0) return false;
        for (int other : r) {
            if (other == a || other == b || other == cc) continue;
            Complex p = poly.vertices[other];
            double d1 = cross(pb - pa, p - pa), d2 = cross(pc - pb, p - pb), d3 = cross(pa - pc, p - pc);
            if (d1 >= 0 && d2 >= 0 && d3 >= 0) return false;
        }
        return true;
    };
    while (ring.size() > 3) {
        bool clipped = false;
        for (size_t i = 0; i < ring.size(); ++i) {
            int a = ring[(i + ring.size() - 1) % ring.size()];
            int b = ring[i];
            int cc = ring[(i + 1) % ring.size()];
            if (is_ear(a, b, cc, ring)) {
                tris.push_back({a, b, cc});
                ring.erase(ring.begin() + static_cast<long>(i));
                clipped = true;
                break;
            }
        }
        if (!clipped) throw Error(Err::Internal, "ear clipping failed");
    }
    tris.push_back({ring[0], ring[1], ring[2]});
    return tris;
}

} // namespace

double Mesh::face_area(int f) const {
    return 0.5 * cross(faces[f].chart[1] - faces[f].chart[0], faces[f].chart[2] - faces[f].chart[0]);
}

Complex Mesh::face_centroid(int f) const {
    return (faces[f].chart[0] + faces[f].chart[1] + faces[f].chart[2]) / 3.0;
}

int Mesh::slot_of_edge(int f, int e) const {
    for (int i = 0; i < 3; ++i)
        if (faces[f].edge[i] == e) return i;
    return -1;
}

double Mesh::vertex_angle_sum(int v) const {
    double total = 0;
    for (const auto& f : faces)
        for (int i = 0; i < 3; ++i)
            if (f.v[i] == v) {
                Complex a = f.chart[(i + 2) % 3] - f.chart[i];
                Complex b = f.chart[(i + 1) % 3] - f.chart[i];
                total += std::abs(std::arg(a * std::conj(b)));
            }
    return total;
}

Mesh triangulate(const FlatSurface& S, double h) {
    double min_edge = std::numeric_limits<double>::infinity();
    for (const Gluing& g : S.gluings())
        min_edge = std::min(min_edge, std::abs(S.polygons()[g.from.polygon].edge_vector(g.from.edge)));
    if (!(h > 0)) throw Error(Err::Parse, "mesh size must be positive");
    h = std::min(h, min_edge); // clamp oversized targets

    MeshBuilder b;
    // one vertex per surface orbit
    for (int o = 0; o < S.num_vertex_orbits(); ++o) {
        Mesh::Vertex v;
        v.angle = S.orbit_angle(o);
        v.marked = S.orbit_marked(o);
        v.in_sigma = S.orbit_in_sigma(o);
        bool conical = std::abs(v.angle - 2 * kPi) > 1e-9;
        if (conical) {
            double unit = S.is_translation() ? 2 * kPi : kPi;
            int shift = S.is_translation() ? 1 : 2;
            v.cone_order = static_cast<int>(std::round(v.angle / unit)) - shift;
        }
        b.add_vertex(v);
    }

    // boundary edges, one per gluing, canonical along the `from` side
    std::map<std::pair<int, int>, std::pair<int, int>> boundary; // (poly, edge) -> (edge id, sign)
    for (const Gluing& g : S.gluings()) {
        int na = S.polygons()[g.from.polygon].size();
        int v0 = S.corner_orbit(g.from.polygon, g.from.edge);
        int v1 = S.corner_orbit(g.from.polygon, (g.from.edge + 1) % na);
        int e = b.add_edge(v0, v1, g.sign);
        boundary[{g.from.polygon, g.from.edge}] = {e, 1};
        boundary[{g.to.polygon, g.to.edge}] = {e, -1};
    }

    for (size_t pi = 0; pi < S.polygons().size(); ++pi) {
        const Polygon& poly = S.polygons()[pi];
        int n = poly.size();
        bool used_center = false;
        auto tris = polygon_triangles(poly, used_center);

        int center = -1;
        Complex cpos = 0;
        if (used_center) {
            for (auto v : poly.vertices) cpos += v;
            cpos /= static_cast<double>(n);
            Mesh::Vertex cv;
            cv.angle = 2 * kPi;
            // an interior marked point at the centroid becomes the hub vertex
            for (const auto& m : S.interior_marked())
                if (m.polygon == static_cast<int>(pi) && std::abs(m.position - cpos) < 1e-9 * std::max(1.0, S.diameter())) {
                    cv.marked = true;
                    cv.in_sigma = true;
                }
            center = b.add_vertex(cv);
        }

        auto corner_vertex = [&](int c) { return c == n ? center : S.corner_orbit(static_cast<int>(pi), c); };
        auto corner_pos = [&](int c) { return c == n ? cpos : poly.vertices[c]; };

        // interior diagonals keyed by local corner pair
        std::map<std::pair<int, int>, std::pair<int, int>> interior; // -> (edge, canonical tail corner)
        auto slot_edge = [&](int ca, int cb) -> std::pair<int, int> {
            if (cb == (ca + 1) % n && ca < n) {
                auto [e, s] = boundary.at({static_cast<int>(pi), ca});
                return {e, s};
            }
            if (ca == (cb + 1) % n && cb < n) {
                auto [e, s] = boundary.at({static_cast<int>(pi), cb});
                return {e, -s};
            }
            auto key = std::minmax(ca, cb);
            auto it = interior.find({key.first, key.second});
            if (it == interior.end()) {
                int e = b.add_edge(corner_vertex(ca), corner_vertex(cb), 1);
                interior[{key.first, key.second}] = {e, ca};
                return {e, 1};
            }
            return {it->second.first, it->second.second == ca ? 1 : -1};
        };

        for (const auto& t : tris) {
            MeshBuilder::BFace f;
            for (int i = 0; i < 3; ++i) {
                f.v[i] = corner_vertex(t[i]);
                f.chart[i] = corner_pos(t[i]);
            }
            for (int i = 0; i < 3; ++i) {
                auto [e, s] = slot_edge(t[i], t[(i + 1) % 3]);
                f.edge[i] = e;
                f.edge_sign[i] = s;
            }
            b.add_face(f);
        }

        // remaining interior marked points: locate and split the face
        for (const auto& m : S.interior_marked()) {
            if (m.polygon != static_cast<int>(pi)) continue;
            if (center >= 0 && b.vertices[center].marked &&
                std::abs(m.position - cpos) < 1e-9 * std::max(1.0, S.diameter()))
                continue;
            throw Error(Err::Parse,
                        "interior marked points away from the polygon centroid are not supported");
        }
    }

    // uniform pass to the target size, then grade toward the cone points
    b.refine([&](int) { return h; });
    b.seed_cone_distances();
    bool any_cone = false;
    for (const auto& v : b.vertices)
        if (std::abs(v.angle - 2 * kPi) > 1e-9) any_cone = true;
    if (any_cone) {
        b.refine([&](int f) {
            double d = std::min({b.vdist[b.faces[f].v[0]], b.vdist[b.faces[f].v[1]], b.vdist[b.faces[f].v[2]]});
            return std::max(h / 8.0, std::min(h, 0.5 * d));
        });
    }
    return b.finalize(&S, h, nullptr);
}

Refinement refine_uniform(const Mesh& M) {
    MeshBuilder b;
    b.vertices = M.vertices;
    for (const auto& e : M.edges) {
        b.edges.push_back({e.v0, e.v1, e.flip});
        b.incid.emplace_back();
        b.children.push_back({-1, -1});
    }
    b.vdist.assign(M.vertices.size(), std::numeric_limits<double>::infinity());
    for (size_t f = 0; f < M.faces.size(); ++f) {
        MeshBuilder::BFace bf;
        bf.v = M.faces[f].v;
        bf.chart = M.faces[f].chart;
        bf.edge = M.faces[f].edge;
        bf.edge_sign = M.faces[f].edge_sign;
        b.faces.push_back(bf);
        for (int i = 0; i < 3; ++i) b.incid[bf.edge[i]].push_back({static_cast<int>(f), i});
    }
    double h = M.target_h / 2;
    b.refine([&](int) { return h; });
    b.seed_cone_distances();
    bool any_cone = false;
    for (const auto& v : b.vertices)
        if (std::abs(v.angle - 2 * kPi) > 1e-9) any_cone = true;
    if (any_cone) {
        b.refine([&](int f) {
            double d = std::min({b.vdist[b.faces[f].v[0]], b.vdist[b.faces[f].v[1]], b.vdist[b.faces[f].v[2]]});
            return std::max(h / 8.0, std::min(h, 0.5 * d));
        });
    }
    Refinement r;
    std::vector<std::vector<int>> chains;
    r.mesh = b.finalize(nullptr, h, &chains);
    r.chains.assign(chains.begin(), chains.begin() + static_cast<long>(M.edges.size()));
    return r;
}

Cycle transfer_cycle(const Cycle& c, const Refinement& r) {
    Cycle out;
    for (auto [e, s] : c.steps) {
        const auto& chain = r.chains[e];
        if (s == 1)
            for (int ce : chain) out.steps.push_back({ce, 1});
        else
            for (auto it = chain.rbegin(); it != chain.rend(); ++it) out.steps.push_back({*it, -1});
    }
    return out;
}

Complex cochain_period(const Mesh& M, const Eigen::VectorXcd& values, const Cycle& c) {
    Complex p = 0;
    for (auto [e, s] : c.steps) p += double(s) * values[e];
    (void)M;
    return p;
}

double max_face_sum(const Mesh& M, const Eigen::VectorXcd& values) {
    double worst = 0;
    for (const auto& f : M.faces) {
        Complex s = 0;
        for (int i = 0; i < 3; ++i) s += double(f.edge_sign[i]) * values[f.edge[i]];
        worst = std::max(worst, std::abs(s));
    }
    return worst;
}

namespace {

// per-face constant covector of a closed real/complex cochain (two-slot solve)
void face_covector(const Mesh& M, const Eigen::VectorXcd& vals, int f, Complex& alpha, Complex& beta) {
    Complex d0 = M.slot_vector(f, 0), d1 = M.slot_vector(f, 1);
    Complex v0 = double(M.faces[f].edge_sign[0]) * vals[M.faces[f].edge[0]];
    Complex v1 = double(M.faces[f].edge_sign[1]) * vals[M.faces[f].edge[1]];
    Complex det = d0 * std::conj(d1) - d1 * std::conj(d0);
    alpha = (v0 * std::conj(d1) - v1 * std::conj(d0)) / det;
    beta = (d0 * v1 - d1 * v0) / det;
}

} // namespace

HomologyBasis homology_basis(const Mesh& M) {
    int V = static_cast<int>(M.vertices.size());
    int E = static_cast<int>(M.edges.size());
    int F = static_cast<int>(M.faces.size());

    // primal spanning tree (BFS, edge order)
    std::vector<int> vparent_edge(V, -1), vdepth(V, -1);
    {
        std::deque<int> q{0};
        vdepth[0] = 0;
        std::vector<std::vector<int>> vedges(V);
        for (int e = 0; e < E; ++e) {
            vedges[M.edges[e].v0].push_back(e);
            vedges[M.edges[e].v1].push_back(e);
        }
        while (!q.empty()) {
            int v = q.front();
            q.pop_front();
            for (int e : vedges[v]) {
                int w = M.edges[e].v0 == v ? M.edges[e].v1 : M.edges[e].v0;
                if (vdepth[w] == -1) {
                    vdepth[w] = vdepth[v] + 1;
                    vparent_edge[w] = e;
                    q.push_back(w);
                }
            }
        }
    }
    std::vector<bool> in_tree(E, false);
    for (int v = 0; v < V; ++v)
        if (vparent_edge[v] >= 0) in_tree[vparent_edge[v]] = true;

    // dual spanning tree over faces avoiding tree edges
    std::vector<int> fparent_edge(F, -1);
    std::vector<int> forder;
    std::vector<bool> in_cotree(E, false);
    {
        std::vector<bool> seen(F, false);
        std::deque<int> q{0};
        seen[0] = true;
        while (!q.empty()) {
            int f = q.front();
            q.pop_front();
            forder.push_back(f);
            for (int i = 0; i < 3; ++i) {
                int e = M.faces[f].edge[i];
                int g = M.faces[f].neighbor[i];
                if (in_tree[e] || seen[g]) continue;
                seen[g] = true;
                fparent_edge[g] = e;
                in_cotree[e] = true;
                q.push_back(g);
            }
        }
        if (static_cast<int>(forder.size()) != F) throw Error(Err::Internal, "dual graph disconnected");
    }

    std::vector<int> leftover;
    for (int e = 0; e < E; ++e)
        if (!in_tree[e] && !in_cotree[e]) leftover.push_back(e);
    if (static_cast<int>(leftover.size()) != 2 * M.genus)
        throw Error(Err::Internal, "tree-cotree leftover count is not 2g");

    auto tree_path = [&](int from, int to) {
        // signed edges from `from` to `to` through the tree
        std::vector<std::pair<int, int>> up_from, up_to;
        int a = from, bb = to;
        while (a != bb) {
            if (vdepth[a] >= vdepth[bb]) {
                int e = vparent_edge[a];
                int par = M.edges[e].v0 == a ? M.edges[e].v1 : M.edges[e].v0;
                up_from.push_back({e, M.edges[e].v0 == a ? 1 : -1});
                a = par;
            } else {
                int e = vparent_edge[bb];
                int par = M.edges[e].v0 == bb ? M.edges[e].v1 : M.edges[e].v0;
                up_to.push_back({e, M.edges[e].v0 == bb ? -1 : 1});
                bb = par;
            }
        }
        std::vector<std::pair<int, int>> path = up_from;
        for (auto it = up_to.rbegin(); it != up_to.rend(); ++it) path.push_back(*it);
        return path;
    };

    HomologyBasis H;
    for (int e : leftover) {
        Cycle c;
        c.steps.push_back({e, 1});
        auto back = tree_path(M.edges[e].v1, M.edges[e].v0);
        c.steps.insert(c.steps.end(), back.begin(), back.end());
        H.cycles.push_back(c);
    }

    // dual closed cochains: indicator on the leftover edge, face sums pushed
    // to zero along the dual tree from the leaves inward
    for (int e : leftover) {
        Eigen::VectorXcd c = Eigen::VectorXcd::Zero(E);
        c[e] = 1.0;
        for (auto it = forder.rbegin(); it != forder.rend(); ++it) {
            int f = *it;
            int pe = fparent_edge[f];
            if (pe < 0) continue;
            Complex sum = 0;
            int pslot = -1;
            for (int i = 0; i < 3; ++i) {
                sum += double(M.faces[f].edge_sign[i]) * c[M.faces[f].edge[i]];
                if (M.faces[f].edge[i] == pe) pslot = i;
            }
            c[pe] -= sum * double(M.faces[f].edge_sign[pslot]);
        }
        H.dual_cochains.push_back(c);
    }
    // orient so the period matrix against the cycles is the identity
    int n = static_cast<int>(leftover.size());
    for (int k = 0; k < n; ++k) {
        Complex p = cochain_period(M, H.dual_cochains[k], H.cycles[k]);
        if (std::abs(p.real() - 1) > 1e-9 && std::abs(p.real() + 1) > 1e-9)
            throw Error(Err::Internal, "tree-cotree duality failed");
        if (p.real() < 0) H.dual_cochains[k] = -H.dual_cochains[k];
        for (int m = 0; m < n; ++m) {
            Complex q = cochain_period(M, H.dual_cochains[k], H.cycles[m]);
            double expect = (k == m) ? 1.0 : 0.0;
            if (std::abs(q - expect) > 1e-9) throw Error(Err::Internal, "dual cochain has wrong periods");
        }
    }

    // intersection pairing via the wedge of the dual covector fields
    H.intersection = Eigen::MatrixXd::Zero(n, n);
    std::vector<std::vector<std::pair<Complex, Complex>>> cov(n);
    for (int k = 0; k < n; ++k) {
        cov[k].resize(M.faces.size());
        for (size_t f = 0; f < M.faces.size(); ++f)
            face_covector(M, H.dual_cochains[k], static_cast<int>(f), cov[k][f].first, cov[k][f].second);
    }
    for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m) {
            Complex acc = 0;
            for (size_t f = 0; f < M.faces.size(); ++f) {
                auto [ak, bk] = cov[k][f];
                auto [am, bm] = cov[m][f];
                acc += (ak * bm - bk * am) * Complex(0, -2) * M.face_area(static_cast<int>(f));
            }
            H.intersection(k, m) = acc.real();
        }
    return H;
}

std::vector<Cycle> relative_paths(const Mesh& M) {
    if (M.sigma_vertices.empty()) return {};
    HomologyBasis H; // reuse the tree machinery via a local BFS
    int V = static_cast<int>(M.vertices.size());
    int E = static_cast<int>(M.edges.size());
    std::vector<int> vparent_edge(V, -1), vdepth(V, -1);
    std::deque<int> q{M.sigma_vertices[0]};
    vdepth[M.sigma_vertices[0]] = 0;
    std::vector<std::vector<int>> vedges(V);
    for (int e = 0; e < E; ++e) {
        vedges[M.edges[e].v0].push_back(e);
        vedges[M.edges[e].v1].push_back(e);
    }
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        for (int e : vedges[v]) {
            int w = M.edges[e].v0 == v ? M.edges[e].v1 : M.edges[e].v0;
            if (vdepth[w] == -1) {
                vdepth[w] = vdepth[v] + 1;
                vparent_edge[w] = e;
                q.push_back(w);
            }
        }
    }
    std::vector<Cycle> out;
    for (size_t i = 1; i < M.sigma_vertices.size(); ++i) {
        Cycle c;
        int v = M.sigma_vertices[i];
        while (vparent_edge[v] != -1) {
            int e = vparent_edge[v];
            c.steps.push_back({e, M.edges[e].v1 == v ? 1 : -1});
            v = M.edges[e].v0 == v ? M.edges[e].v1 : M.edges[e].v0;
        }
        std::reverse(c.steps.begin(), c.steps.end());
        out.push_back(c);
    }
    return out;
}

Eigen::VectorXcd omega_cochain(const Mesh& M) {
    if (!M.translation)
        throw Error(Err::HalfTranslationInput, "edge holonomy is only defined up to sign");
    Eigen::VectorXcd vals = Eigen::VectorXcd::Zero(M.edges.size());
    std::vector<bool> set(M.edges.size(), false);
    for (size_t f = 0; f < M.faces.size(); ++f)
        for (int i = 0; i < 3; ++i) {
            int e = M.faces[f].edge[i];
            Complex v = double(M.faces[f].edge_sign[i]) * M.slot_vector(static_cast<int>(f), i);
            if (!set[e]) {
                vals[e] = v;
                set[e] = true;
            } else if (std::abs(vals[e] - v) > 1e-9 * std::max(1.0, M.scale)) {
                throw Error(Err::Internal, "holonomy disagrees between charts");
            }
        }
    return vals;
}

std::string mesh_to_json(const Mesh& M) {
    nlohmann::json j;
    j["schema"] = 1;
    j["genus"] = M.genus;
    j["area"] = M.area;
    j["translation"] = M.translation;
    j["counts"] = {{"vertices", M.vertices.size()}, {"edges", M.edges.size()}, {"faces", M.faces.size()}};
    j["vertices"] = nlohmann::json::array();
    for (const auto& v : M.vertices)
        j["vertices"].push_back({{"sigma", v.in_sigma}, {"marked", v.marked}, {"order", v.cone_order}, {"angle", v.angle}});
    j["edges"] = nlohmann::json::array();
    for (const auto& e : M.edges) j["edges"].push_back({{"v", {e.v0, e.v1}}, {"flip", e.flip}});
    j["faces"] = nlohmann::json::array();
    for (const auto& f : M.faces) {
        nlohmann::json jf;
        jf["v"] = {f.v[0], f.v[1], f.v[2]};
        jf["chart"] = nlohmann::json::array();
        for (auto c : f.chart) jf["chart"].push_back({c.real(), c.imag()});
        jf["edge"] = {f.edge[0], f.edge[1], f.edge[2]};
        jf["edge_sign"] = {f.edge_sign[0], f.edge_sign[1], f.edge_sign[2]};
        j["faces"].push_back(jf);
    }
    return j.dump();
}

} // namespace strata
