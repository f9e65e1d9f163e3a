#pragma once

#include <string>
#include <vector>

#include "viewstack/data.hpp"
#include "viewstack/geometry.hpp"
#include "viewstack/spec.hpp"

namespace viewstack {

/// Content-space point. y grows northward.
struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

/// Maps lon/lat degrees to content units. Equirectangular output is in
/// degrees of longitude (scaled by cos of the standard parallel) and latitude;
/// Albers output is in unit-sphere radians scaled to degrees so both kinds have
/// comparable magnitudes.
class Projection {
 public:
  explicit Projection(const ProjectionSpec& spec);

  Point operator()(LonLat p) const;
  const ProjectionSpec& spec() const { return spec_; }

 private:
  ProjectionSpec spec_;
  double cos_parallel_ = 1.0;
  double n_ = 0.0;
  double c_ = 0.0;
  double rho0_ = 0.0;
};

struct ProjectedGeo {
  /// Area-weighted centroid per feature.
  std::vector<Point> centroids;
  /// Projected polygon area per feature, holes subtracted (content units²).
  std::vector<double> areas;
  /// Projected rings per feature (outer rings and holes, in input order).
  std::vector<std::vector<std::vector<Point>>> rings;
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  ContentBox box() const { return ContentBox(max_x - min_x, max_y - min_y); }
};

/// Signed shoelace area of a ring (positive when counter-clockwise).
double signed_area(const std::vector<Point>& ring);

/// Projects every feature. Zero-area features get a vertex-mean centroid and a
/// warning. Throws LayoutError if the projected extent is degenerate.
ProjectedGeo project(const GeoFeatureCollection& geo, const ProjectionSpec& spec,
                     std::vector<std::string>* warnings = nullptr);

}  // namespace viewstack
