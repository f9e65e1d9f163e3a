#include "viewstack/layout.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "viewstack/errors.hpp"

namespace viewstack {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

double unit_random(std::mt19937& rng) { return static_cast<double>(rng()) / 4294967296.0; }

}  // namespace

FitResult fit_with_margin(const Viewport& v, const ContentBox& c, double margin) {
  const double w = v.width() - 2.0 * margin;
  const double h = v.height() - 2.0 * margin;
  if (w <= 0.0 || h <= 0.0) return {0.0, std::max(0.0, w) / 2.0, std::max(0.0, h) / 2.0};
  return fit_content(Viewport(w, h), c);
}

ScreenMapper screen_mapper(const ProjectedGeo& pg, const Viewport& v, double margin) {
  return {fit_with_margin(v, pg.box(), margin), pg.min_x, pg.max_y, margin};
}

CircleLayout circle_map_layout(const ProjectedGeo& pg, const std::vector<double>& values, const Viewport& v,
                               double k, double margin) {
  if (values.size() != pg.centroids.size()) throw std::invalid_argument("circle_map_layout: value count mismatch");
  const ScreenMapper map = screen_mapper(pg, v, margin);
  CircleLayout out;
  out.map_scale = map.fit.scale;
  out.circles.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Point p = map(pg.centroids[i]);
    out.circles.push_back({i, p.x, p.y, k * std::sqrt(std::max(0.0, values[i])) * map.fit.scale});
  }
  return out;
}

DorlingResult dorling_relax(const std::vector<Point>& origins, const std::vector<double>& radii, unsigned seed,
                            int max_iterations) {
  const std::size_t n = origins.size();
  if (radii.size() != n) throw std::invalid_argument("dorling_relax: radius count mismatch");
  DorlingResult out{origins, radii, 0.0, 0};
  auto& p = out.centers;
  std::mt19937 rng(seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  double rmax = 0.0;
  for (double r : radii) rmax = std::max(rmax, r);
  const double tol = 1e-6 * std::max(1.0, rmax);

  auto collide = [&]() {
    double worst = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      const std::size_t i = order[a];
      for (std::size_t b = a + 1; b < n; ++b) {
        const std::size_t j = order[b];
        double dx = p[j].x - p[i].x;
        double dy = p[j].y - p[i].y;
        const double reach = radii[i] + radii[j];
        if (std::abs(dx) >= reach || std::abs(dy) >= reach) continue;
        double d = std::sqrt(dx * dx + dy * dy);
        const double overlap = reach - d;
        if (overlap <= 0.0) continue;
        worst = std::max(worst, overlap);
        if (d < 1e-12) {
          const double angle = 2.0 * M_PI * unit_random(rng);
          dx = std::cos(angle);
          dy = std::sin(angle);
          d = 1.0;
        }
        const double ri2 = radii[i] * radii[i];
        const double rj2 = radii[j] * radii[j];
        const double wi = ri2 + rj2 > 0.0 ? rj2 / (ri2 + rj2) : 0.5;
        // Push slightly past contact so the pair ends up just touching.
        const double push = overlap * 1.001;
        p[i].x -= dx / d * push * wi;
        p[i].y -= dy / d * push * wi;
        p[j].x += dx / d * push * (1.0 - wi);
        p[j].y += dy / d * push * (1.0 - wi);
      }
    }
    return worst;
  };

  auto residual = [&]() {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double dx = p[j].x - p[i].x;
        const double dy = p[j].y - p[i].y;
        const double reach = radii[i] + radii[j];
        if (std::abs(dx) >= reach + worst || std::abs(dy) >= reach + worst) continue;
        worst = std::max(worst, reach - std::sqrt(dx * dx + dy * dy));
      }
    }
    return worst;
  };

  for (int it = 0; it < max_iterations; ++it) {
    const double alpha = 0.1 * (1.0 - static_cast<double>(it) / max_iterations);
    for (std::size_t i = 0; i < n; ++i) {
      p[i].x += alpha * (origins[i].x - p[i].x);
      p[i].y += alpha * (origins[i].y - p[i].y);
    }
    collide();
    ++out.iterations;
    if (residual() <= tol) break;
  }
  // Repulsion-only cleanup for whatever the attraction phase left behind.
  for (int it = 0; it < 10000 && residual() > tol; ++it) {
    collide();
    ++out.iterations;
  }
  out.residual_overlap = std::max(0.0, residual());
  return out;
}

std::vector<double> choropleth_areas(const ProjectedGeo& pg, const Viewport& v, double margin) {
  const double s = fit_with_margin(v, pg.box(), margin).scale;
  std::vector<double> out;
  out.reserve(pg.areas.size());
  for (double a : pg.areas) out.push_back(a * s * s);
  return out;
}

double hex_area(double width) { return kSqrt3 / 2.0 * width * width; }

namespace {

struct HexBounds {
  int min_q, max_q, min_r, max_r;
  double width_units, height_units;
};

HexBounds hex_bounds(const std::vector<HexCoord>& coords) {
  if (coords.empty()) throw std::invalid_argument("hexgrid_layout: no hex positions");
  int min_q = coords[0].col, max_q = coords[0].col, min_r = coords[0].row, max_r = coords[0].row;
  for (const auto& c : coords) {
    min_q = std::min(min_q, c.col);
    max_q = std::max(max_q, c.col);
    min_r = std::min(min_r, c.row);
    max_r = std::max(max_r, c.row);
  }
  bool shifted = false;
  for (const auto& c : coords) shifted = shifted || ((max_r - c.row) & 1);
  const double width_units = (max_q - min_q + 1) + (shifted ? 0.5 : 0.0);
  const double height_units = (max_r - min_r) * kSqrt3 / 2.0 + 2.0 / kSqrt3;
  return {min_q, max_q, min_r, max_r, width_units, height_units};
}

}  // namespace

ContentBox hexgrid_extent(const std::vector<HexCoord>& coords) {
  const HexBounds b = hex_bounds(coords);
  return ContentBox(b.width_units, b.height_units);
}

HexLayout hexgrid_layout(const std::vector<HexCoord>& coords, const Viewport& v, double margin) {
  const auto [min_q, max_q, min_r, max_r, width_units, height_units] = hex_bounds(coords);
  const double inner_w = std::max(0.0, v.width() - 2.0 * margin);
  const double inner_h = std::max(0.0, v.height() - 2.0 * margin);
  HexLayout out;
  out.width = std::min(inner_w / width_units, inner_h / height_units);
  const double w = out.width;
  const double ox = margin + (inner_w - width_units * w) / 2.0;
  const double oy = margin + (inner_h - height_units * w) / 2.0;
  out.cells.reserve(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const int rc = max_r - coords[i].row;
    const int qc = coords[i].col - min_q;
    const double shift = (rc & 1) ? 0.5 : 0.0;
    out.cells.push_back({i, ox + (qc + shift + 0.5) * w, oy + w / kSqrt3 + rc * w * kSqrt3 / 2.0});
  }
  return out;
}

WaffleLayout waffle_layout(const std::vector<std::vector<std::size_t>>& groups, const Viewport& v,
                           Orientation orientation, int group_gap, double margin) {
  std::vector<const std::vector<std::size_t>*> blocks;
  std::size_t largest = 0;
  for (const auto& g : groups) {
    if (g.empty()) continue;
    blocks.push_back(&g);
    largest = std::max(largest, g.size());
  }
  if (blocks.empty()) throw std::invalid_argument("waffle_layout: no items");
  // "along" is the axis blocks are stacked on; "across" is the block span.
  const bool vertical = orientation == Orientation::vertical;
  const double inner_w = std::max(0.0, v.width() - 2.0 * margin);
  const double inner_h = std::max(0.0, v.height() - 2.0 * margin);
  const double across_extent = vertical ? inner_w : inner_h;
  const double along_extent = vertical ? inner_h : inner_w;

  auto along_count = [&](std::size_t span) {
    std::size_t total = 0;
    for (const auto* b : blocks) total += (b->size() + span - 1) / span;
    return total + (blocks.size() - 1) * static_cast<std::size_t>(group_gap);
  };

  WaffleLayout out;
  std::size_t best_span = 1;
  for (std::size_t span = 1; span <= largest; ++span) {
    const double s = std::min(across_extent / span, along_extent / along_count(span));
    if (s > out.side) {
      out.side = s;
      best_span = span;
    }
  }
  out.block_span = static_cast<int>(best_span);
  const double s = out.side;
  const double used_across = best_span * s;
  const double used_along = along_count(best_span) * s;
  const double o_across = (across_extent - used_across) / 2.0;
  const double o_along = (along_extent - used_along) / 2.0;
  std::size_t along = 0;
  for (const auto* b : blocks) {
    for (std::size_t k = 0; k < b->size(); ++k) {
      const double a = o_across + (k % best_span) * s;
      const double l = o_along + (along + k / best_span) * s;
      out.squares.push_back({(*b)[k], margin + (vertical ? a : l), margin + (vertical ? l : a)});
    }
    along += (b->size() + best_span - 1) / best_span + group_gap;
  }
  return out;
}

BarLayout bar_layout(const std::vector<double>& values, const Viewport& v, Orientation orientation,
                     double min_pitch, double margin) {
  if (!(min_pitch > 0.0)) throw std::invalid_argument("bar_layout: min_pitch must be positive");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  const bool vertical = orientation == Orientation::vertical;
  const double inner_w = std::max(0.0, v.width() - 2.0 * margin);
  const double inner_h = std::max(0.0, v.height() - 2.0 * margin);
  const double cross = vertical ? inner_w : inner_h;
  const double main = vertical ? inner_h : inner_w;

  BarLayout out;
  out.shown = std::min(values.size(), static_cast<std::size_t>(std::floor(cross / min_pitch)));
  if (out.shown == 0) return out;
  out.pitch = cross / out.shown;
  const double top = values[order[0]] > 0.0 ? values[order[0]] : 1.0;
  for (std::size_t i = 0; i < out.shown; ++i) {
    const std::size_t item = order[i];
    const double len = std::max(0.0, values[item]) / top * main;
    Bar b{item, len, 0, 0, 0, 0};
    const double thickness = out.pitch * 0.8;
    if (vertical) {
      b.x = margin + i * out.pitch + out.pitch * 0.1;
      b.y = margin + main - len;
      b.w = thickness;
      b.h = len;
    } else {
      b.x = margin;
      b.y = margin + i * out.pitch + out.pitch * 0.1;
      b.w = len;
      b.h = thickness;
    }
    out.bars.push_back(b);
  }
  return out;
}

PlotArea plot_area(const Viewport& v, double margin) {
  return {margin, margin, std::max(0.0, v.width() - 2.0 * margin), std::max(0.0, v.height() - 2.0 * margin)};
}

namespace {

struct Extent {
  double lo = 0.0;
  double hi = 0.0;
  double unit(double v) const { return hi > lo ? (v - lo) / (hi - lo) : 0.5; }
};

std::pair<Extent, Extent> extents(const std::vector<std::optional<double>>& xs,
                                  const std::vector<std::optional<double>>& ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("x and y columns differ in length");
  Extent ex{HUGE_VAL, -HUGE_VAL}, ey{HUGE_VAL, -HUGE_VAL};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!xs[i] || !ys[i]) continue;
    ex.lo = std::min(ex.lo, *xs[i]);
    ex.hi = std::max(ex.hi, *xs[i]);
    ey.lo = std::min(ey.lo, *ys[i]);
    ey.hi = std::max(ey.hi, *ys[i]);
  }
  return {ex, ey};
}

}  // namespace

ScatterLayout scatter_layout(const std::vector<std::optional<double>>& xs, const std::vector<std::optional<double>>& ys,
                             const Viewport& v, double mark_radius, double margin) {
  const auto [ex, ey] = extents(xs, ys);
  ScatterLayout out;
  out.area = plot_area(v, margin);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!xs[i] || !ys[i]) {
      ++out.dropped;
      continue;
    }
    out.marks.push_back({i, out.area.x0 + ex.unit(*xs[i]) * out.area.width,
                         out.area.y0 + (1.0 - ey.unit(*ys[i])) * out.area.height, mark_radius});
  }
  return out;
}

HeatmapLayout heatmap_layout(const std::vector<std::optional<double>>& xs, const std::vector<std::optional<double>>& ys,
                             const Viewport& v, int bins_x, int bins_y, double margin) {
  if (bins_x < 1 || bins_y < 1) throw std::invalid_argument("heatmap_layout: bins must be at least 1");
  const auto [ex, ey] = extents(xs, ys);
  HeatmapLayout out;
  out.area = plot_area(v, margin);
  out.bins_x = bins_x;
  out.bins_y = bins_y;
  out.cell_width = out.area.width / bins_x;
  out.cell_height = out.area.height / bins_y;
  out.counts.assign(static_cast<std::size_t>(bins_x) * bins_y, 0);
  auto bin = [](double u, int n) { return std::clamp(static_cast<int>(std::floor(u * n)), 0, n - 1); };
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!xs[i] || !ys[i]) {
      ++out.dropped;
      continue;
    }
    // Degenerate extents put everything in the first bin.
    const double ux = ex.hi > ex.lo ? ex.unit(*xs[i]) : 0.0;
    const double uy = ey.hi > ey.lo ? ey.unit(*ys[i]) : 0.0;
    ++out.counts[static_cast<std::size_t>(bin(uy, bins_y)) * bins_x + bin(ux, bins_x)];
  }
  return out;
}

MatrixLayout matrix_layout(std::size_t node_count, const Viewport& v, double label_gutter) {
  if (node_count == 0) throw std::invalid_argument("matrix_layout: no nodes");
  const double side = std::min(v.width(), v.height());
  return {std::max(0.0, (side - label_gutter) / node_count), label_gutter, label_gutter};
}

ArcLayout arc_layout(std::size_t node_count, const Viewport& v, double label_gutter) {
  if (node_count == 0) throw std::invalid_argument("arc_layout: no nodes");
  ArcLayout out;
  out.pitch = std::max(0.0, (v.width() - label_gutter) / node_count);
  out.baseline = std::max(v.height() / 2.0, v.height() - label_gutter / 2.0);
  out.xs.reserve(node_count);
  for (std::size_t i = 0; i < node_count; ++i) out.xs.push_back(label_gutter / 2.0 + out.pitch * (i + 0.5));
  return out;
}

std::vector<Point> force_layout(const Network& network, unsigned seed, int iterations) {
  const std::size_t n = network.nodes.size();
  if (n == 0) throw std::invalid_argument("force_layout: no nodes");
  std::vector<Point> p(n, {0.5, 0.5});
  if (n == 1) return p;
  std::mt19937 rng(seed);
  for (auto& q : p) q = {unit_random(rng), unit_random(rng)};
  const double k = std::sqrt(1.0 / n);
  std::vector<Point> disp(n);
  for (int it = 0; it < iterations; ++it) {
    const double temp = 0.1 * (1.0 - static_cast<double>(it) / iterations);
    std::fill(disp.begin(), disp.end(), Point{});
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        double dx = p[i].x - p[j].x, dy = p[i].y - p[j].y;
        const double d = std::max(1e-6, std::hypot(dx, dy));
        const double f = k * k / d;
        disp[i].x += dx / d * f;
        disp[i].y += dy / d * f;
        disp[j].x -= dx / d * f;
        disp[j].y -= dy / d * f;
      }
    }
    for (const auto& l : network.links) {
      const double dx = p[l.source].x - p[l.target].x, dy = p[l.source].y - p[l.target].y;
      const double d = std::max(1e-6, std::hypot(dx, dy));
      const double f = d * d / k;
      disp[l.source].x -= dx / d * f;
      disp[l.source].y -= dy / d * f;
      disp[l.target].x += dx / d * f;
      disp[l.target].y += dy / d * f;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double len = std::hypot(disp[i].x, disp[i].y);
      if (len > 0.0) {
        const double step = std::min(len, temp);
        p[i].x += disp[i].x / len * step;
        p[i].y += disp[i].y / len * step;
      }
      p[i].x = std::clamp(p[i].x, 0.0, 1.0);
      p[i].y = std::clamp(p[i].y, 0.0, 1.0);
    }
  }
  // Normalise to the unit square.
  double x0 = 1, x1 = 0, y0 = 1, y1 = 0;
  for (const auto& q : p) {
    x0 = std::min(x0, q.x);
    x1 = std::max(x1, q.x);
    y0 = std::min(y0, q.y);
    y1 = std::max(y1, q.y);
  }
  for (auto& q : p) {
    q.x = x1 > x0 ? (q.x - x0) / (x1 - x0) : 0.5;
    q.y = y1 > y0 ? (q.y - y0) / (y1 - y0) : 0.5;
  }
  return p;
}

std::vector<Point> fit_unit_positions(const std::vector<Point>& unit, const Viewport& v, double margin,
                                      double node_radius) {
  const double inset = margin + node_radius;
  const double w = v.width() - 2.0 * inset;
  const double h = v.height() - 2.0 * inset;
  std::vector<Point> out;
  out.reserve(unit.size());
  for (const auto& u : unit) {
    const double x = w > 0.0 ? inset + u.x * w : v.width() / 2.0;
    const double y = h > 0.0 ? inset + u.y * h : v.height() / 2.0;
    out.push_back({std::clamp(x, 0.0, v.width()), std::clamp(y, 0.0, v.height())});
  }
  return out;
}

}  // namespace viewstack
