#include "viewstack/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "viewstack/errors.hpp"

namespace viewstack {

namespace {

constexpr double kDeg = M_PI / 180.0;

double wrap_lon(double lon) {
  while (lon > 180.0) lon -= 360.0;
  while (lon < -180.0) lon += 360.0;
  return lon;
}

}  // namespace

Projection::Projection(const ProjectionSpec& spec) : spec_(spec) {
  if (spec.kind == ProjectionKind::equirectangular) {
    cos_parallel_ = std::cos(spec.standard_parallel * kDeg);
  } else {
    const double s1 = std::sin(spec.parallel_1 * kDeg);
    const double s2 = std::sin(spec.parallel_2 * kDeg);
    n_ = (s1 + s2) / 2.0;
    if (std::abs(n_) < 1e-12) throw ValidationError("albers_conic: standard parallels cancel out");
    const double c1 = std::cos(spec.parallel_1 * kDeg);
    c_ = c1 * c1 + 2.0 * n_ * s1;
    rho0_ = std::sqrt(c_ - 2.0 * n_ * std::sin(spec.origin_lat * kDeg)) / n_;
  }
}

Point Projection::operator()(LonLat p) const {
  const double dlon = wrap_lon(p.lon - spec_.center_lon);
  if (spec_.kind == ProjectionKind::equirectangular) return {dlon * cos_parallel_, p.lat};
  const double rho = std::sqrt(std::max(0.0, c_ - 2.0 * n_ * std::sin(p.lat * kDeg))) / n_;
  const double theta = n_ * dlon * kDeg;
  return {rho * std::sin(theta) / kDeg, (rho0_ - rho * std::cos(theta)) / kDeg};
}

double signed_area(const std::vector<Point>& ring) {
  double a = 0.0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) a += ring[i].x * ring[i + 1].y - ring[i + 1].x * ring[i].y;
  return a / 2.0;
}

ProjectedGeo project(const GeoFeatureCollection& geo, const ProjectionSpec& spec,
                     std::vector<std::string>* warnings) {
  const Projection proj(spec);
  ProjectedGeo out;
  out.min_x = out.min_y = std::numeric_limits<double>::infinity();
  out.max_x = out.max_y = -std::numeric_limits<double>::infinity();
  out.centroids.reserve(geo.features.size());
  out.areas.reserve(geo.features.size());
  out.rings.reserve(geo.features.size());

  for (const auto& f : geo.features) {
    std::vector<std::vector<Point>> rings;
    double area = 0.0, cx = 0.0, cy = 0.0;
    double mx = 0.0, my = 0.0;
    std::size_t count = 0;
    for (const auto& poly : f.polygons) {
      for (std::size_t r = 0; r < poly.rings.size(); ++r) {
        std::vector<Point> ring;
        ring.reserve(poly.rings[r].size());
        for (const auto& ll : poly.rings[r]) {
          const Point p = proj(ll);
          ring.push_back(p);
          out.min_x = std::min(out.min_x, p.x);
          out.max_x = std::max(out.max_x, p.x);
          out.min_y = std::min(out.min_y, p.y);
          out.max_y = std::max(out.max_y, p.y);
          mx += p.x;
          my += p.y;
          ++count;
        }
        // Outer ring adds, holes subtract, whatever the winding.
        const double a = signed_area(ring);
        const double sign = (r == 0) == (a >= 0.0) ? 1.0 : -1.0;
        double rx = 0.0, ry = 0.0;
        for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
          const double cross = ring[i].x * ring[i + 1].y - ring[i + 1].x * ring[i].y;
          rx += (ring[i].x + ring[i + 1].x) * cross;
          ry += (ring[i].y + ring[i + 1].y) * cross;
        }
        area += sign * a;
        cx += sign * rx / 6.0;
        cy += sign * ry / 6.0;
        rings.push_back(std::move(ring));
      }
    }
    if (count == 0) throw LayoutError("", "feature '" + f.id + "' has no coordinates");
    if (std::abs(area) > 1e-12) {
      out.centroids.push_back({cx / area, cy / area});
    } else {
      if (warnings) warnings->push_back("feature '" + f.id + "' has zero area; using vertex mean as centroid");
      out.centroids.push_back({mx / count, my / count});
    }
    out.areas.push_back(std::abs(area));
    out.rings.push_back(std::move(rings));
  }
  if (out.centroids.empty() || !(out.max_x > out.min_x) || !(out.max_y > out.min_y)) {
    throw LayoutError("", "projected extent is degenerate");
  }
  return out;
}

}  // namespace viewstack
