#include "strata/builtin.hpp"

#include <cmath>
#include <numbers>

namespace strata::builtin {

namespace {

Polygon rect(double x0, double y0, double w, double h) {
    Polygon p;
    p.vertices = {{x0, y0}, {x0 + w, y0}, {x0 + w, y0 + h}, {x0, y0 + h}};
    return p;
}

} // namespace

SurfaceDesc square_torus() {
    SurfaceDesc d;
    d.polygons.push_back(rect(0, 0, 1, 1));
    d.gluings.push_back({{0, 0}, {0, 2}, 1});
    d.gluings.push_back({{0, 1}, {0, 3}, 1});
    return d;
}

SurfaceDesc square_torus_marked() {
    SurfaceDesc d = square_torus();
    d.marked_points.push_back({0, {0, 0}});
    return d;
}

SurfaceDesc square_torus_marked2() {
    SurfaceDesc d = square_torus_marked();
    d.marked_points.push_back({0, {0.5, 0.5}});
    return d;
}

SurfaceDesc torus_2x1() {
    SurfaceDesc d;
    d.polygons.push_back(rect(0, 0, 2, 1));
    d.gluings.push_back({{0, 0}, {0, 2}, 1});
    d.gluings.push_back({{0, 1}, {0, 3}, 1});
    return d;
}

SurfaceDesc regular_octagon() {
    SurfaceDesc d;
    const double pi = std::numbers::pi;
    const double R = 0.5 / std::sin(pi / 8); // circumradius for unit sides
    Polygon p;
    for (int k = 0; k < 8; ++k) {
        double t = pi / 8 + k * pi / 4;
        p.vertices.push_back({R * std::cos(t), R * std::sin(t)});
    }
    d.polygons.push_back(p);
    for (int k = 0; k < 4; ++k) d.gluings.push_back({{0, k}, {0, k + 4}, 1});
    return d;
}

SurfaceDesc pillowcase() {
    SurfaceDesc d;
    d.polygons.push_back(rect(0, 0, 1, 1));
    for (int e = 0; e < 4; ++e) d.gluings.push_back({{0, e}, {0, e}, -1});
    return d;
}

SurfaceDesc qtiled_1111() {
    // Cyclic triple cover of the two-square pillowcase. Sheets s = 0,1,2 hold
    // squares A_s (left) and B_s (right); the vertical seam between A and B
    // shifts the sheet by +1, the wraparound seam by -1, and the fold
    // identifications along top and bottom stay on their sheet.
    SurfaceDesc d;
    for (int s = 0; s < 3; ++s) {
        d.polygons.push_back(rect(3.0 * s, 0, 1, 1));       // A_s -> polygon 2s
        d.polygons.push_back(rect(3.0 * s + 1.5, 0, 1, 1)); // B_s -> polygon 2s+1
    }
    auto A = [](int s) { return 2 * ((s % 3 + 3) % 3); };
    auto B = [](int s) { return 2 * ((s % 3 + 3) % 3) + 1; };
    for (int s = 0; s < 3; ++s) {
        d.gluings.push_back({{A(s), 1}, {B(s + 1), 3}, 1}); // middle seam
        d.gluings.push_back({{B(s), 1}, {A(s + 2), 3}, 1}); // wraparound seam
        d.gluings.push_back({{A(s), 0}, {B(s), 0}, -1});    // bottom fold
        d.gluings.push_back({{B(s), 2}, {A(s), 2}, -1});    // top fold
    }
    return d;
}

std::optional<SurfaceDesc> by_name(const std::string& name) {
    if (name == "torus") return square_torus();
    if (name == "torus-marked") return square_torus_marked();
    if (name == "torus-marked2") return square_torus_marked2();
    if (name == "torus-2x1") return torus_2x1();
    if (name == "octagon") return regular_octagon();
    if (name == "pillowcase") return pillowcase();
    if (name == "q1111") return qtiled_1111();
    return std::nullopt;
}

std::vector<std::string> names() {
    return {"torus", "torus-marked", "torus-marked2", "torus-2x1", "octagon", "pillowcase", "q1111"};
}

} // namespace strata::builtin
