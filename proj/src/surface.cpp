#include "strata/surface.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace strata {

using nlohmann::json;

const char* err_name(Err e) {
    switch (e) {
        case Err::Parse: return "Parse";
        case Err::NonSimplePolygon: return "NonSimplePolygon";
        case Err::EdgeMismatch: return "EdgeMismatch";
        case Err::Disconnected: return "Disconnected";
        case Err::AlreadyTranslation: return "AlreadyTranslation";
        case Err::HalfTranslationInput: return "HalfTranslationInput";
        case Err::SolverFailure: return "SolverFailure";
        case Err::RankDeficient: return "RankDeficient";
        case Err::NonEquivariantMesh: return "NonEquivariantMesh";
        case Err::RadiusTooLarge: return "RadiusTooLarge";
        case Err::NotClosed: return "NotClosed";
        case Err::NotHarmonic: return "NotHarmonic";
        case Err::NotPrincipal: return "NotPrincipal";
        case Err::DiskNotEmbedded: return "DiskNotEmbedded";
        case Err::Internal: return "Internal";
    }
    return "Unknown";
}

namespace {

constexpr double kPi = std::numbers::pi;

double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }

double signed_area(const std::vector<Complex>& v) {
    double a = 0;
    int n = static_cast<int>(v.size());
    for (int i = 0; i < n; ++i) a += cross(v[i], v[(i + 1) % n]);
    return 0.5 * a;
}

bool segments_intersect(Complex a, Complex b, Complex c, Complex d) {
    auto orient = [](Complex p, Complex q, Complex r) { return cross(q - p, r - p); };
    double o1 = orient(a, b, c), o2 = orient(a, b, d);
    double o3 = orient(c, d, a), o4 = orient(c, d, b);
    return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0));
}

bool point_in_polygon(const std::vector<Complex>& v, Complex p) {
    bool inside = false;
    int n = static_cast<int>(v.size());
    for (int i = 0, j = n - 1; i < n; j = i++) {
        bool cond = (v[i].imag() > p.imag()) != (v[j].imag() > p.imag());
        if (cond) {
            double x = v[j].real() + (p.imag() - v[j].imag()) / (v[i].imag() - v[j].imag()) *
                                         (v[i].real() - v[j].real());
            if (p.real() < x) inside = !inside;
        }
    }
    return inside;
}

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

double interior_angle(const Polygon& poly, int i) {
    int n = poly.size();
    Complex a = poly.vertices[(i + n - 1) % n] - poly.vertices[i];
    Complex b = poly.vertices[(i + 1) % n] - poly.vertices[i];
    double t = std::arg(a * std::conj(b));
    if (t <= 0) t += 2 * kPi;
    return t;
}

} // namespace

double Polygon::area() const { return signed_area(vertices); }

double Polygon::diameter() const {
    double d = 0;
    for (size_t i = 0; i < vertices.size(); ++i)
        for (size_t j = i + 1; j < vertices.size(); ++j)
            d = std::max(d, std::abs(vertices[i] - vertices[j]));
    return d;
}

int FlatSurface::corner_orbit(int polygon, int corner) const {
    return corner_orbit_[corner_offset_[polygon] + corner];
}

bool FlatSurface::orbit_in_sigma(int orbit) const {
    return orbit_marked_[orbit] || std::abs(orbit_angle_[orbit] - 2 * kPi) > 1e-9;
}

FlatSurface::EdgePartner FlatSurface::partner(int polygon, int edge) const {
    int idx = partner_index_[corner_offset_[polygon] + edge];
    const Gluing& g = gluings_[idx];
    if (g.from.polygon == polygon && g.from.edge == edge) return {g.to, g.sign};
    return {g.from, g.sign};
}

FlatSurface FlatSurface::validate(const SurfaceDesc& raw) {
    if (raw.polygons.empty()) throw Error(Err::Parse, "no polygons");

    double diam = 0;
    for (const auto& p : raw.polygons) diam = std::max(diam, p.diameter());
    const double tol = 1e-12 * std::max(diam, 1e-30);

    // basic polygon sanity
    for (size_t pi = 0; pi < raw.polygons.size(); ++pi) {
        const auto& v = raw.polygons[pi].vertices;
        int n = static_cast<int>(v.size());
        if (n < 3)
            throw Error(Err::NonSimplePolygon, "polygon " + std::to_string(pi) + " has fewer than 3 vertices");
        if (signed_area(v) <= tol * diam)
            throw Error(Err::NonSimplePolygon,
                        "polygon " + std::to_string(pi) + " is not counterclockwise or degenerate");
        for (int i = 0; i < n; ++i)
            if (std::abs(v[(i + 1) % n] - v[i]) <= tol)
                throw Error(Err::NonSimplePolygon, "polygon " + std::to_string(pi) + " has a zero-length edge");
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                if (j == i + 1 || (i == 0 && j == n - 1)) continue; // adjacent
                if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]))
                    throw Error(Err::NonSimplePolygon, "polygon " + std::to_string(pi) + " self-intersects");
            }
    }

    auto check_ref = [&](const EdgeRef& r) {
        if (r.polygon < 0 || r.polygon >= static_cast<int>(raw.polygons.size()) || r.edge < 0 ||
            r.edge >= raw.polygons[r.polygon].size())
            throw Error(Err::Parse, "gluing references a nonexistent edge");
    };

    // Collect split parameters per directed edge: fold midpoints of
    // self-identified edges, and marked points landing on edge interiors
    // (mirrored onto the glued partner).
    std::map<std::pair<int, int>, std::vector<double>> splits;
    std::map<std::pair<int, int>, int> owner; // edge -> gluing index
    for (size_t gi = 0; gi < raw.gluings.size(); ++gi) {
        const Gluing& g = raw.gluings[gi];
        check_ref(g.from);
        check_ref(g.to);
        if (g.sign != 1 && g.sign != -1) throw Error(Err::Parse, "gluing sign must be +1 or -1");
        for (auto r : {g.from, g.to}) {
            auto key = std::make_pair(r.polygon, r.edge);
            if (owner.count(key) && !(g.from == g.to && r == g.from))
                throw Error(Err::EdgeMismatch, "edge glued more than once");
            owner[key] = static_cast<int>(gi);
        }
        if (g.from == g.to) {
            if (g.sign != -1)
                throw Error(Err::EdgeMismatch, "edge identified with itself by translation");
            splits[{g.from.polygon, g.from.edge}].push_back(0.5);
        }
    }
    for (size_t pi = 0; pi < raw.polygons.size(); ++pi) {
        int n = raw.polygons[pi].size();
        for (int e = 0; e < n; ++e)
            if (!owner.count({static_cast<int>(pi), e}))
                throw Error(Err::EdgeMismatch, "edge (" + std::to_string(pi) + "," + std::to_string(e) +
                                                   ") is not glued");
    }

    std::vector<std::pair<int, Complex>> corner_marks; // (polygon, position)
    std::vector<MarkedPoint> interior_marks;
    auto add_split = [&](int p, int e, double t) {
        auto& list = splits[{p, e}];
        for (double s : list)
            if (std::abs(s - t) < 1e-9) return;
        list.push_back(t);
    };
    for (const auto& mp : raw.marked_points) {
        if (mp.polygon < 0 || mp.polygon >= static_cast<int>(raw.polygons.size()))
            throw Error(Err::Parse, "marked point references a nonexistent polygon");
        const auto& poly = raw.polygons[mp.polygon];
        int n = poly.size();
        bool placed = false;
        for (int i = 0; i < n && !placed; ++i)
            if (std::abs(mp.position - poly.vertices[i]) <= 1e-9 * std::max(diam, 1.0)) {
                corner_marks.push_back({mp.polygon, poly.vertices[i]});
                placed = true;
            }
        for (int e = 0; e < n && !placed; ++e) {
            Complex a = poly.vertices[e], d = poly.edge_vector(e);
            double len2 = std::norm(d);
            double t = ((mp.position - a) * std::conj(d)).real() / len2;
            if (t <= 1e-9 || t >= 1 - 1e-9) continue;
            if (std::abs(mp.position - (a + t * d)) > 1e-9 * std::max(diam, 1.0)) continue;
            add_split(mp.polygon, e, t);
            corner_marks.push_back({mp.polygon, a + t * d});
            const Gluing& g = raw.gluings[owner[{mp.polygon, e}]];
            if (g.from == g.to) {
                add_split(mp.polygon, e, 1 - t);
            } else {
                EdgeRef other = (g.from.polygon == mp.polygon && g.from.edge == e) ? g.to : g.from;
                add_split(other.polygon, other.edge, 1 - t);
                const auto& q = raw.polygons[other.polygon];
                corner_marks.push_back({other.polygon,
                                        q.vertices[other.edge] + (1 - t) * q.edge_vector(other.edge)});
            }
            placed = true;
        }
        if (!placed) {
            if (!point_in_polygon(poly.vertices, mp.position))
                throw Error(Err::Parse, "marked point lies outside its polygon");
            interior_marks.push_back(mp);
            placed = true;
        }
    }

    // Rebuild polygons with split corners inserted.
    FlatSurface s;
    s.diameter_ = diam;
    std::map<std::pair<int, int>, std::vector<int>> sub_edges; // old edge -> new edge indices
    for (size_t pi = 0; pi < raw.polygons.size(); ++pi) {
        const auto& poly = raw.polygons[pi];
        Polygon np;
        for (int e = 0; e < poly.size(); ++e) {
            auto it = splits.find({static_cast<int>(pi), e});
            std::vector<double> ts;
            if (it != splits.end()) {
                ts = it->second;
                std::sort(ts.begin(), ts.end());
            }
            auto& subs = sub_edges[{static_cast<int>(pi), e}];
            subs.push_back(np.size());
            np.vertices.push_back(poly.vertices[e]);
            for (double t : ts) {
                subs.push_back(np.size());
                np.vertices.push_back(poly.vertices[e] + t * poly.edge_vector(e));
            }
        }
        s.polygons_.push_back(std::move(np));
    }
    for (const Gluing& g : raw.gluings) {
        const auto& fsubs = sub_edges[{g.from.polygon, g.from.edge}];
        const auto& tsubs = sub_edges[{g.to.polygon, g.to.edge}];
        int k = static_cast<int>(fsubs.size());
        if (g.from == g.to) {
            for (int i = 0; 2 * i < k - 1; ++i)
                s.gluings_.push_back({{g.from.polygon, fsubs[i]}, {g.from.polygon, fsubs[k - 1 - i]}, -1});
        } else {
            if (static_cast<int>(tsubs.size()) != k)
                throw Error(Err::Internal, "mismatched split counts on glued edges");
            for (int i = 0; i < k; ++i)
                s.gluings_.push_back({{g.from.polygon, fsubs[i]}, {g.to.polygon, tsubs[k - 1 - i]}, g.sign});
        }
    }
    s.interior_marked_ = interior_marks;

    // directed-edge -> gluing table, coverage check, vector check
    s.corner_offset_.resize(s.polygons_.size() + 1, 0);
    for (size_t pi = 0; pi < s.polygons_.size(); ++pi)
        s.corner_offset_[pi + 1] = s.corner_offset_[pi] + s.polygons_[pi].size();
    int total_corners = s.corner_offset_.back();
    s.partner_index_.assign(total_corners, -1);
    s.translation_ = true;
    for (size_t gi = 0; gi < s.gluings_.size(); ++gi) {
        const Gluing& g = s.gluings_[gi];
        if (g.sign == -1) s.translation_ = false;
        for (auto r : {g.from, g.to}) {
            int idx = s.corner_offset_[r.polygon] + r.edge;
            if (s.partner_index_[idx] != -1)
                throw Error(Err::EdgeMismatch, "edge glued more than once after splitting");
            s.partner_index_[idx] = static_cast<int>(gi);
        }
        Complex v1 = s.polygons_[g.from.polygon].edge_vector(g.from.edge);
        Complex v2 = s.polygons_[g.to.polygon].edge_vector(g.to.edge);
        if (std::abs(v2 - double(g.sign) * (-v1)) > tol * 1e3)
            throw Error(Err::EdgeMismatch, "glued edge vectors disagree");
    }
    for (int i = 0; i < total_corners; ++i)
        if (s.partner_index_[i] == -1) throw Error(Err::EdgeMismatch, "unglued edge after splitting");

    // gluing graph connectivity
    {
        UnionFind uf(static_cast<int>(s.polygons_.size()));
        for (const Gluing& g : s.gluings_) uf.unite(g.from.polygon, g.to.polygon);
        int root = uf.find(0);
        for (size_t pi = 1; pi < s.polygons_.size(); ++pi)
            if (uf.find(static_cast<int>(pi)) != root)
                throw Error(Err::Disconnected, "gluing graph is not connected");
    }

    s.build_orbits();

    // mark corner orbits
    s.orbit_marked_.assign(s.num_orbits_, false);
    for (const auto& [pi, pos] : corner_marks) {
        const auto& poly = s.polygons_[pi];
        bool found = false;
        for (int i = 0; i < poly.size(); ++i)
            if (std::abs(poly.vertices[i] - pos) <= 1e-9 * std::max(diam, 1.0)) {
                s.orbit_marked_[s.corner_orbit(pi, i)] = true;
                found = true;
                break;
            }
        if (!found) throw Error(Err::Internal, "lost a marked corner during splitting");
    }

    s.area_ = 0;
    for (const auto& p : s.polygons_) s.area_ += p.area();

    int V = s.num_orbits_;
    int E = static_cast<int>(s.gluings_.size());
    int F = static_cast<int>(s.polygons_.size());
    int chi = V - E + F;
    if ((2 - chi) % 2 != 0) throw Error(Err::Internal, "odd Euler characteristic");
    s.genus_ = (2 - chi) / 2;

    // Gauss-Bonnet consistency
    double defect = 0;
    for (int o = 0; o < s.num_orbits_; ++o) defect += 2 * kPi - s.orbit_angle_[o];
    if (std::abs(defect - 2 * kPi * chi) > 1e-6)
        throw Error(Err::Internal, "angle defect does not match Euler characteristic");

    // cone angles must be multiples of pi (2pi in the translation case)
    double unit = s.translation_ ? 2 * kPi : kPi;
    for (int o = 0; o < s.num_orbits_; ++o) {
        double a = s.orbit_angle_[o];
        if (std::abs(a - unit * std::round(a / unit)) > 1e-7)
            throw Error(Err::EdgeMismatch, "vertex orbit angle is not an admissible cone angle");
    }

    return s;
}

void FlatSurface::build_orbits() {
    int total = corner_offset_.back();
    UnionFind uf(total);
    for (const Gluing& g : gluings_) {
        int na = polygons_[g.from.polygon].size();
        int nb = polygons_[g.to.polygon].size();
        int a = corner_offset_[g.from.polygon] + g.from.edge;
        int a1 = corner_offset_[g.from.polygon] + (g.from.edge + 1) % na;
        int b = corner_offset_[g.to.polygon] + g.to.edge;
        int b1 = corner_offset_[g.to.polygon] + (g.to.edge + 1) % nb;
        uf.unite(a, b1); // tail of `from` meets head of `to`
        uf.unite(a1, b);
    }
    std::map<int, int> relabel;
    corner_orbit_.resize(total);
    for (int i = 0; i < total; ++i) {
        int r = uf.find(i);
        auto [it, fresh] = relabel.try_emplace(r, static_cast<int>(relabel.size()));
        corner_orbit_[i] = it->second;
    }
    num_orbits_ = static_cast<int>(relabel.size());
    orbit_angle_.assign(num_orbits_, 0.0);
    for (size_t pi = 0; pi < polygons_.size(); ++pi)
        for (int i = 0; i < polygons_[pi].size(); ++i)
            orbit_angle_[corner_orbit(static_cast<int>(pi), i)] += interior_angle(polygons_[pi], i);
}

std::vector<ConePoint> FlatSurface::cone_points() const {
    std::vector<ConePoint> out;
    double unit = translation_ ? 2 * kPi : kPi;
    int shift = translation_ ? 1 : 2;
    for (int o = 0; o < num_orbits_; ++o) {
        double a = orbit_angle_[o];
        bool conical = std::abs(a - 2 * kPi) > 1e-9;
        if (!conical && !orbit_marked_[o]) continue;
        ConePoint cp;
        cp.orbit = o;
        cp.total_angle = a;
        cp.order = static_cast<int>(std::round(a / unit)) - shift;
        cp.is_marked = !conical && orbit_marked_[o];
        out.push_back(cp);
    }
    return out;
}

std::vector<int> FlatSurface::stratum_signature() const {
    std::vector<int> ks;
    for (const auto& cp : cone_points()) ks.push_back(cp.order);
    std::sort(ks.rbegin(), ks.rend());
    return ks;
}

FlatSurface FlatSurface::scaled(double s) const {
    SurfaceDesc d;
    for (const auto& p : polygons_) {
        Polygon q;
        for (auto v : p.vertices) q.vertices.push_back(v * s);
        d.polygons.push_back(q);
    }
    d.gluings = gluings_;
    for (const auto& m : interior_marked_) d.marked_points.push_back({m.polygon, m.position * s});
    for (size_t pi = 0; pi < polygons_.size(); ++pi)
        for (int i = 0; i < polygons_[pi].size(); ++i)
            if (orbit_marked_[corner_orbit(static_cast<int>(pi), i)])
                d.marked_points.push_back({static_cast<int>(pi), polygons_[pi].vertices[i] * s});
    return validate(d);
}

DoubleCover double_cover(const FlatSurface& base) {
    if (base.is_translation())
        throw Error(Err::AlreadyTranslation, "surface carries no -1 gluings");

    SurfaceDesc d;
    for (const auto& p : base.polygons()) {
        Polygon sheet0 = p, sheet1;
        for (auto v : p.vertices) sheet1.vertices.push_back(-v);
        d.polygons.push_back(sheet0);
        d.polygons.push_back(sheet1);
    }
    for (const Gluing& g : base.gluings()) {
        int fp = g.from.polygon, tp = g.to.polygon;
        if (g.sign == 1) {
            d.gluings.push_back({{2 * fp, g.from.edge}, {2 * tp, g.to.edge}, 1});
            d.gluings.push_back({{2 * fp + 1, g.from.edge}, {2 * tp + 1, g.to.edge}, 1});
        } else {
            d.gluings.push_back({{2 * fp, g.from.edge}, {2 * tp + 1, g.to.edge}, 1});
            d.gluings.push_back({{2 * fp + 1, g.from.edge}, {2 * tp, g.to.edge}, 1});
        }
    }
    // Sigma lifts to Sigma: mark both preimages of every marked/conical base point
    for (size_t pi = 0; pi < base.polygons().size(); ++pi) {
        const auto& poly = base.polygons()[pi];
        for (int i = 0; i < poly.size(); ++i)
            if (base.orbit_in_sigma(base.corner_orbit(static_cast<int>(pi), i))) {
                d.marked_points.push_back({static_cast<int>(2 * pi), poly.vertices[i]});
                d.marked_points.push_back({static_cast<int>(2 * pi + 1), -poly.vertices[i]});
            }
    }
    for (const auto& m : base.interior_marked()) {
        d.marked_points.push_back({2 * m.polygon, m.position});
        d.marked_points.push_back({2 * m.polygon + 1, -m.position});
    }

    DoubleCover dc;
    dc.base = base;
    dc.cover = FlatSurface::validate(d);
    int np = static_cast<int>(base.polygons().size());
    dc.base_polygon.resize(2 * np);
    dc.sheet.resize(2 * np);
    dc.tau_polygon.resize(2 * np);
    for (int p = 0; p < np; ++p) {
        dc.base_polygon[2 * p] = p;
        dc.base_polygon[2 * p + 1] = p;
        dc.sheet[2 * p] = 0;
        dc.sheet[2 * p + 1] = 1;
        dc.tau_polygon[2 * p] = 2 * p + 1;
        dc.tau_polygon[2 * p + 1] = 2 * p;
    }
    dc.base_orbit_ramified.assign(base.num_vertex_orbits(), false);
    for (int o = 0; o < base.num_vertex_orbits(); ++o) {
        int halfturns = static_cast<int>(std::round(base.orbit_angle(o) / kPi));
        dc.base_orbit_ramified[o] = (halfturns % 2) != 0;
    }
    return dc;
}

SurfaceDesc parse_surface_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(Err::Parse, e.what());
    }
    SurfaceDesc d;
    try {
        for (const auto& jp : j.at("polygons")) {
            Polygon p;
            for (const auto& jv : jp.at("vertices"))
                p.vertices.push_back({jv.at(0).get<double>(), jv.at(1).get<double>()});
            d.polygons.push_back(p);
        }
        for (const auto& jg : j.at("gluings")) {
            Gluing g;
            g.from = {jg.at("from").at(0).get<int>(), jg.at("from").at(1).get<int>()};
            g.to = {jg.at("to").at(0).get<int>(), jg.at("to").at(1).get<int>()};
            g.sign = jg.at("sign").get<int>();
            d.gluings.push_back(g);
        }
        if (j.contains("marked_points"))
            for (const auto& jm : j.at("marked_points")) {
                MarkedPoint m;
                m.polygon = jm.at("polygon").get<int>();
                m.position = {jm.at("position").at(0).get<double>(),
                              jm.at("position").at(1).get<double>()};
                d.marked_points.push_back(m);
            }
    } catch (const json::exception& e) {
        throw Error(Err::Parse, e.what());
    }
    return d;
}

SurfaceDesc load_surface_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Err::Parse, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_surface_json(ss.str());
}

std::string surface_to_json(const SurfaceDesc& desc) {
    json j;
    j["polygons"] = json::array();
    for (const auto& p : desc.polygons) {
        json jp;
        jp["vertices"] = json::array();
        for (auto v : p.vertices) jp["vertices"].push_back({v.real(), v.imag()});
        j["polygons"].push_back(jp);
    }
    j["gluings"] = json::array();
    for (const auto& g : desc.gluings)
        j["gluings"].push_back({{"from", {g.from.polygon, g.from.edge}},
                                {"to", {g.to.polygon, g.to.edge}},
                                {"sign", g.sign}});
    j["marked_points"] = json::array();
    for (const auto& m : desc.marked_points)
        j["marked_points"].push_back(
            {{"polygon", m.polygon}, {"position", {m.position.real(), m.position.imag()}}});
    return j.dump(2);
}

} // namespace strata
