#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "viewstack/geometry.hpp"
#include "viewstack/projection.hpp"
#include "viewstack/spec.hpp"

namespace viewstack {

/// Fit of a content box into a viewport shrunk by `margin` on every side.
/// Scale is 0 when the margins consume the viewport.
FitResult fit_with_margin(const Viewport& v, const ContentBox& c, double margin);

/// Maps content points (y north) to screen pixels (y down) for a fit.
struct ScreenMapper {
  FitResult fit;
  double min_x = 0.0;
  double max_y = 0.0;
  double margin = 0.0;

  Point operator()(Point p) const {
    return {margin + fit.offset_x + (p.x - min_x) * fit.scale, margin + fit.offset_y + (max_y - p.y) * fit.scale};
  }
};

ScreenMapper screen_mapper(const ProjectedGeo& pg, const Viewport& v, double margin);

struct Circle {
  std::size_t item = 0;
  double x = 0.0;
  double y = 0.0;
  double r = 0.0;
};

struct CircleLayout {
  std::vector<Circle> circles;
  double map_scale = 0.0;
};

/// radius_i = k * sqrt(value_i) * fit scale, centred on the fitted centroid.
CircleLayout circle_map_layout(const ProjectedGeo& pg, const std::vector<double>& values, const Viewport& v,
                               double k, double margin = 0.0);

struct DorlingResult {
  /// Displaced centres in content units, same order as the input.
  std::vector<Point> centers;
  std::vector<double> radii;
  /// Largest remaining pairwise overlap, content units.
  double residual_overlap = 0.0;
  int iterations = 0;
};

/// Relaxes circles (content units) until they no longer overlap, pulling each
/// toward its origin. Deterministic for a fixed seed.
DorlingResult dorling_relax(const std::vector<Point>& origins, const std::vector<double>& radii, unsigned seed,
                            int max_iterations);

/// Rendered area per feature (px²) at a viewport.
std::vector<double> choropleth_areas(const ProjectedGeo& pg, const Viewport& v, double margin = 0.0);

struct HexCell {
  std::size_t item = 0;
  double x = 0.0;
  double y = 0.0;
};

struct HexLayout {
  /// Flat-to-flat width of each pointy-top hexagon, px.
  double width = 0.0;
  std::vector<HexCell> cells;
};

double hex_area(double width);

/// Grid extent in hex widths; its aspect ratio is the hex map's intrinsic one.
ContentBox hexgrid_extent(const std::vector<HexCoord>& coords);

/// Odd-r offset layout of hexjson-style positions (rows grow north).
HexLayout hexgrid_layout(const std::vector<HexCoord>& coords, const Viewport& v, double margin = 0.0);

struct Square {
  std::size_t item = 0;
  double x = 0.0;
  double y = 0.0;
};

struct WaffleLayout {
  double side = 0.0;
  /// Squares per block row (vertical) or column (horizontal).
  int block_span = 0;
  std::vector<Square> squares;
};

/// `groups` lists item indices per block, already ordered.
WaffleLayout waffle_layout(const std::vector<std::vector<std::size_t>>& groups, const Viewport& v,
                           Orientation orientation, int group_gap = 1, double margin = 0.0);

struct Bar {
  std::size_t item = 0;
  double length = 0.0;
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
};

struct BarLayout {
  std::vector<Bar> bars;
  double pitch = 0.0;
  std::size_t shown = 0;
};

/// Bars sorted by descending value; as many as fit at `min_pitch`.
BarLayout bar_layout(const std::vector<double>& values, const Viewport& v, Orientation orientation,
                     double min_pitch, double margin = 0.0);

struct PlotArea {
  double x0 = 0.0;
  double y0 = 0.0;
  double width = 0.0;
  double height = 0.0;
};

PlotArea plot_area(const Viewport& v, double margin);

struct ScatterLayout {
  PlotArea area;
  std::vector<Circle> marks;
  std::size_t dropped = 0;
};

/// Linear scales from the data extent onto the plot area; rows missing either
/// coordinate are dropped.
ScatterLayout scatter_layout(const std::vector<std::optional<double>>& xs, const std::vector<std::optional<double>>& ys,
                             const Viewport& v, double mark_radius, double margin);

struct HeatmapLayout {
  PlotArea area;
  int bins_x = 1;
  int bins_y = 1;
  double cell_width = 0.0;
  double cell_height = 0.0;
  /// Row-major counts, row 0 at the bottom of the data range.
  std::vector<std::size_t> counts;
  std::size_t dropped = 0;
};

HeatmapLayout heatmap_layout(const std::vector<std::optional<double>>& xs, const std::vector<std::optional<double>>& ys,
                             const Viewport& v, int bins_x, int bins_y, double margin);

struct MatrixLayout {
  double cell = 0.0;
  double x0 = 0.0;
  double y0 = 0.0;
};

MatrixLayout matrix_layout(std::size_t node_count, const Viewport& v, double label_gutter);

struct ArcLayout {
  double pitch = 0.0;
  double baseline = 0.0;
  std::vector<double> xs;
};

ArcLayout arc_layout(std::size_t node_count, const Viewport& v, double label_gutter);

/// Force-directed positions in the unit square, deterministic per seed.
std::vector<Point> force_layout(const Network& network, unsigned seed, int iterations);

/// Maps unit-square positions into the viewport, clamped so every node
/// (including its radius) lies inside.
std::vector<Point> fit_unit_positions(const std::vector<Point>& unit, const Viewport& v, double margin,
                                      double node_radius);

}  // namespace viewstack
