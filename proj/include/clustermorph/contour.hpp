#pragma once

#include "clustermorph/bitgrid.hpp"
#include "clustermorph/geometry.hpp"

namespace clustermorph {

/// Boundary of the largest 4-connected foreground component, traced along
/// pixel edges (vertices on pixel corners) with collinear vertices elided.
/// The polygon area equals the component's pixel count. Holes are ignored.
/// Throws EmptyMaskError for an all-background grid.
Contour extract_contour(const BitGrid& grid);

/// Label of the largest 4-connected component as its own grid.
BitGrid largest_component(const BitGrid& grid);

}  // namespace clustermorph
