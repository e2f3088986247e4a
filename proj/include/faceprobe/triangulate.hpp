#pragma once

#include <array>

#include "faceprobe/dataset.hpp"

namespace fp {

// Bowyer-Watson Delaunay triangulation. Points are inserted in index order,
// so the result is deterministic for identical input. Vertex indices of each
// triangle are counter-clockwise.
std::vector<std::array<int, 3>> delaunay_triangulate(const std::vector<Point2>& points);

}  // namespace fp
