#pragma once

#include <string>

#include "corridor/model.hpp"

namespace corridor {

// Time-distance diagram of a geometric instance: paths as line segments (up in blue,
// down in green; cancelled ones in red when a solution is given), job windows as
// dotted rectangles over their location bands, chosen possessions as filled
// rectangles. Pure SVG 1.1 text with fixed two-decimal coordinates, byte-identical
// across runs. Throws model_error for abstract or explicit-crossing instances.
std::string render_diagram(const Instance& inst, const Solution* sol = nullptr);

}  // namespace corridor
