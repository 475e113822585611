#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "strata/error.hpp"

namespace strata {

using Complex = std::complex<double>;

struct Polygon {
    std::vector<Complex> vertices; // counterclockwise, simple
    int size() const { return static_cast<int>(vertices.size()); }
    Complex edge_vector(int e) const {
        int n = size();
        return vertices[(e + 1) % n] - vertices[e];
    }
    double area() const;
    double diameter() const;
};

struct EdgeRef {
    int polygon = -1;
    int edge = -1;
    bool operator==(const EdgeRef&) const = default;
};

// sign +1: edges identified by z -> z + c, sign -1: by z -> -z + c.
struct Gluing {
    EdgeRef from, to;
    int sign = 1;
};

struct MarkedPoint {
    int polygon = -1;
    Complex position;
};

// Raw input, as parsed from a surface file.
struct SurfaceDesc {
    std::vector<Polygon> polygons;
    std::vector<Gluing> gluings;
    std::vector<MarkedPoint> marked_points;
};

struct ConePoint {
    int orbit = -1;          // vertex orbit id
    double total_angle = 0;  // radians
    int order = 0;           // 2pi(k+1) in the Abelian case, pi(k+2) in the quadratic case
    bool is_marked = false;  // angle 2pi but the point belongs to Sigma
};

// A validated translation or half-translation surface. Marked points sitting
// on polygon edges have been promoted to corners (splitting the edge and its
// glued partner); self-identified edges are split at the fold midpoint.
class FlatSurface {
  public:
    static FlatSurface validate(const SurfaceDesc& raw);

    const std::vector<Polygon>& polygons() const { return polygons_; }
    const std::vector<Gluing>& gluings() const { return gluings_; }
    // Marked points strictly inside a polygon; boundary ones became corners.
    const std::vector<MarkedPoint>& interior_marked() const { return interior_marked_; }

    bool is_translation() const { return translation_; }
    int genus() const { return genus_; }
    double area() const { return area_; }
    double diameter() const { return diameter_; }

    int num_vertex_orbits() const { return num_orbits_; }
    int corner_orbit(int polygon, int corner) const;
    double orbit_angle(int orbit) const { return orbit_angle_[orbit]; }
    bool orbit_marked(int orbit) const { return orbit_marked_[orbit]; }
    bool orbit_in_sigma(int orbit) const;

    // Orbits with angle != 2pi, plus marked orbits (order-zero points of Sigma).
    std::vector<ConePoint> cone_points() const;
    // Zero orders, nonincreasing; translation surfaces use the Abelian
    // convention, half-translation the quadratic one (poles count as -1).
    std::vector<int> stratum_signature() const;

    // partner of a directed polygon edge, with the gluing sign
    struct EdgePartner {
        EdgeRef ref;
        int sign;
    };
    EdgePartner partner(int polygon, int edge) const;

    FlatSurface scaled(double s) const;

    FlatSurface() = default; // empty surface; fill via validate()

  private:
    void build_orbits();

    std::vector<Polygon> polygons_;
    std::vector<Gluing> gluings_;
    std::vector<MarkedPoint> interior_marked_;
    std::vector<int> corner_offset_;     // per polygon, into corner_orbit_
    std::vector<int> corner_orbit_;
    std::vector<double> orbit_angle_;
    std::vector<bool> orbit_marked_;
    std::vector<int> partner_index_;     // directed edge -> gluing index
    int num_orbits_ = 0;
    int genus_ = 0;
    double area_ = 0;
    double diameter_ = 0;
    bool translation_ = true;
};

// The canonical (holonomy) double cover of a half-translation surface.
// Polygon p of the base lifts to polygons 2p (sheet 0, same chart) and
// 2p+1 (sheet 1, chart negated); tau swaps the sheets via z -> -z.
struct DoubleCover {
    FlatSurface base;
    FlatSurface cover;
    // cover polygon index -> (base polygon, sheet)
    std::vector<int> base_polygon;
    std::vector<int> sheet;
    // involution on cover polygons (2p <-> 2p+1)
    std::vector<int> tau_polygon;
    // base vertex orbits that are ramification points (odd order)
    std::vector<bool> base_orbit_ramified;
};

DoubleCover double_cover(const FlatSurface& base);

// JSON serialization of the surface file format.
SurfaceDesc parse_surface_json(const std::string& text);
SurfaceDesc load_surface_file(const std::string& path);
std::string surface_to_json(const SurfaceDesc& desc);

} // namespace strata
