#pragma once

#include <array>
#include <span>
#include <vector>

#include "logcc/grid.hpp"

namespace logcc {

using Segment = std::array<Point, 2>;

/// Marching squares on a 2D grid for the set {field > level}. The grid is padded by one
/// ring of virtual nodes holding `outside`, so contours close at the box edge.
std::vector<Segment> marching_squares(const Grid& grid, std::span<const double> field, double level,
                                      double outside = 0.0);

struct Crossing {
    Point x;
    std::size_t inside_node;
};

/// Points where the level is crossed along grid edges (the marching-squares vertices),
/// with the node on the inside. Uses the same padding as marching_squares.
std::vector<Crossing> level_crossings(const Grid& grid, std::span<const double> field, double level,
                                      double outside = 0.0);

double polyline_length(const std::vector<Segment>& segments);

/// Indices of the convex hull vertices of pts, counter-clockwise.
std::vector<std::size_t> convex_hull(const std::vector<Point>& pts);

double hull_perimeter(const std::vector<Point>& pts);

/// Trapezoid line integral along the convex hull of pts of a value attached to each point.
double hull_line_integral(const std::vector<Point>& pts, const std::vector<double>& values);

}  // namespace logcc
