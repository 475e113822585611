#pragma once

#include "strata/surface.hpp"

namespace strata::builtin {

// Unit square with opposite sides identified by translation.
SurfaceDesc square_torus();
// Same, with Sigma = {corner} resp. {corner, center}.
SurfaceDesc square_torus_marked();
SurfaceDesc square_torus_marked2();
// 2x1 flat torus.
SurfaceDesc torus_2x1();
// Regular octagon with unit sides, opposite sides identified.
SurfaceDesc regular_octagon();
// Unit square with every side folded onto itself: the (-1,-1,-1,-1) pillowcase.
SurfaceDesc pillowcase();
// Six-square half-translation surface in the principal stratum Q(1,1,1,1),
// built as a cyclic triple cover of the pillowcase.
SurfaceDesc qtiled_1111();

// Lookup by name ("torus", "torus-marked", "torus-marked2", "torus-2x1",
// "octagon", "pillowcase", "q1111"); empty optional if unknown.
std::optional<SurfaceDesc> by_name(const std::string& name);
std::vector<std::string> names();

} // namespace strata::builtin
