#include "viewstack/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace viewstack {

namespace {

ConstraintResult at_least(ConstraintKind kind, double measured, double threshold) {
  return {kind, measured >= threshold, measured, threshold, measured - threshold};
}

ConstraintResult at_most(ConstraintKind kind, double measured, double threshold) {
  return {kind, measured <= threshold, measured, threshold, threshold - measured};
}

}  // namespace

ConstraintResult eval_min_circle_radius(const CircleLayout& cl, double min_diameter, double allowed_failure_fraction) {
  std::size_t small = 0;
  for (const auto& c : cl.circles) small += 2.0 * c.r < min_diameter;
  const double measured = cl.circles.empty() ? 0.0 : static_cast<double>(small) / cl.circles.size();
  ConstraintResult r = at_most(ConstraintKind::min_circle_radius, measured, allowed_failure_fraction);
  r.threshold = min_diameter;
  return r;
}

ConstraintResult eval_min_area_size(const std::vector<double>& areas_px, double min_width) {
  double smallest = areas_px.empty() ? 0.0 : *std::min_element(areas_px.begin(), areas_px.end());
  return at_least(ConstraintKind::min_area_size, std::sqrt(std::max(0.0, smallest)), min_width);
}

ConstraintResult eval_min_hex_size(const HexLayout& g, double min_width) {
  return at_least(ConstraintKind::min_hex_size, g.width, min_width);
}

ConstraintResult eval_min_square_size(const WaffleLayout& g, double min_width) {
  return at_least(ConstraintKind::min_square_size, g.side, min_width);
}

ConstraintResult eval_min_label_size(ConstraintKind kind, double label_size, double min_size) {
  return at_least(kind, label_size, min_size);
}

double disk_overlap(double r1, double r2, double d) {
  const double small = std::min(r1, r2);
  const double big = std::max(r1, r2);
  if (small <= 0.0) return (d < big || d == 0.0) ? 1.0 : 0.0;
  if (d >= r1 + r2) return 0.0;
  if (d <= big - small) return 1.0;
  if (r1 == r2) {
    // Symmetric lens: both half-angles equal acos(d / 2r).
    const double a = std::acos(std::clamp(d / (2.0 * r1), -1.0, 1.0));
    const double lens = 2.0 * r1 * r1 * a - 0.5 * d * std::sqrt(std::max(0.0, (2.0 * r1 - d) * (2.0 * r1 + d)));
    return std::clamp(lens / (M_PI * small * small), 0.0, 1.0);
  }
  const double a1 = std::acos(std::clamp((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1), -1.0, 1.0));
  const double a2 = std::acos(std::clamp((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2), -1.0, 1.0));
  const double k = (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2);
  const double lens = r1 * r1 * a1 + r2 * r2 * a2 - 0.5 * std::sqrt(std::max(0.0, k));
  return std::clamp(lens / (M_PI * small * small), 0.0, 1.0);
}

namespace {

/// Sums overlaps of pair (i, j) over the given ascending candidates j > i.
/// Pairs whose offset already exceeds r_i + r_j on one axis contribute an
/// exact 0 and are skipped, which leaves the running sum bit-identical.
double pair_sum(const std::vector<Circle>& marks, std::size_t i, const std::vector<std::size_t>& candidates,
                double sum) {
  const auto& a = marks[i];
  for (std::size_t j : candidates) {
    const auto& b = marks[j];
    const double reach = a.r + b.r;
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    if (std::abs(dx) >= reach && reach > 0.0) continue;
    if (std::abs(dy) >= reach && reach > 0.0) continue;
    sum += disk_overlap(a.r, b.r, std::hypot(dx, dy));
  }
  return sum;
}

BoundedOverplotting grid_overplotting(const std::vector<Circle>& marks, double limit) {
  const std::size_t n = marks.size();
  if (n < 2) return {};
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  double rmax = 0.0;
  double x0 = marks[0].x, x1 = marks[0].x, y0 = marks[0].y, y1 = marks[0].y;
  for (const auto& m : marks) {
    rmax = std::max(rmax, m.r);
    x0 = std::min(x0, m.x);
    x1 = std::max(x1, m.x);
    y0 = std::min(y0, m.y);
    y1 = std::max(y1, m.y);
  }
  // Any cell at least 2·rmax wide keeps overlapping pairs in adjacent cells;
  // growing it with the extent bounds the grid at about 12n cells.
  const double w = x1 - x0;
  const double h = y1 - y0;
  const double nn = 4.0 * static_cast<double>(n);
  double cell = std::max({2.0 * rmax, std::sqrt(w * h / (4.0 * nn)), w / nn, h / nn});
  if (!(cell > 0.0) || !std::isfinite(cell)) cell = 1.0;
  const auto gw = static_cast<std::size_t>(w / cell) + 1;
  const auto gh = static_cast<std::size_t>(h / cell) + 1;

  // Buckets in CSR form; a stable counting sort keeps each bucket in index order.
  std::vector<std::size_t> cell_of(n), start(gw * gh + 1, 0), items(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto cx = std::min(gw - 1, static_cast<std::size_t>((marks[i].x - x0) / cell));
    const auto cy = std::min(gh - 1, static_cast<std::size_t>((marks[i].y - y0) / cell));
    cell_of[i] = cy * gw + cx;
    ++start[cell_of[i] + 1];
  }
  for (std::size_t k = 0; k < gw * gh; ++k) start[k + 1] += start[k];
  {
    std::vector<std::size_t> fill(start.begin(), start.end() - 1);
    for (std::size_t i = 0; i < n; ++i) items[fill[cell_of[i]]++] = i;
  }

  if (std::isfinite(limit)) {
    // Every overlap is at most 1 and rounding is monotone, so the number of
    // pairs sharing a neighbourhood bounds the floating-point sum from above.
    double bound = 0.0;
    auto count = [&](std::size_t x, std::size_t y) { return static_cast<double>(start[y * gw + x + 1] - start[y * gw + x]); };
    for (std::size_t y = 0; y < gh; ++y) {
      for (std::size_t x = 0; x < gw; ++x) {
        const double c = count(x, y);
        if (c == 0.0) continue;
        double forward = x + 1 < gw ? count(x + 1, y) : 0.0;
        if (y + 1 < gh) {
          for (std::size_t nx = x > 0 ? x - 1 : 0; nx <= std::min(gw - 1, x + 1); ++nx) forward += count(nx, y + 1);
        }
        bound += c * (c - 1.0) / 2.0 + c * forward;
      }
    }
    if (bound / pairs <= limit) return {bound / pairs, false};
  }

  double sum = 0.0;
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < n; ++i) {
    candidates.clear();
    const std::size_t cx = cell_of[i] % gw;
    const std::size_t cy = cell_of[i] / gw;
    for (std::size_t y = cy > 0 ? cy - 1 : 0; y <= std::min(gh - 1, cy + 1); ++y) {
      for (std::size_t x = cx > 0 ? cx - 1 : 0; x <= std::min(gw - 1, cx + 1); ++x) {
        const auto first = items.begin() + static_cast<std::ptrdiff_t>(start[y * gw + x]);
        const auto last = items.begin() + static_cast<std::ptrdiff_t>(start[y * gw + x + 1]);
        candidates.insert(candidates.end(), std::upper_bound(first, last, i), last);
      }
    }
    std::sort(candidates.begin(), candidates.end());
    sum = pair_sum(marks, i, candidates, sum);
    if (sum / pairs > limit) return {sum / pairs, true};
  }
  return {sum / pairs, false};
}

}  // namespace

double overplotting(const std::vector<Circle>& marks) {
  return grid_overplotting(marks, std::numeric_limits<double>::infinity()).value;
}

BoundedOverplotting overplotting_bounded(const std::vector<Circle>& marks, double limit) {
  return grid_overplotting(marks, limit);
}

ConstraintResult eval_max_overplotting(double measured, double max_value) {
  return at_most(ConstraintKind::max_overplotting, measured, max_value);
}

ConstraintResult eval_aspect(ConstraintKind kind, const Viewport& v, const std::optional<ContentBox>& content,
                             double threshold) {
  const double ar = aspect_ratio(v);
  switch (kind) {
    case ConstraintKind::min_aspect_ratio:
      return at_least(kind, ar, threshold);
    case ConstraintKind::max_aspect_ratio:
      return at_most(kind, ar, threshold);
    case ConstraintKind::max_aspect_ratio_diff: {
      if (!content) throw std::invalid_argument("maxAspectRatioDiff needs a content box");
      const double arc = aspect_ratio(*content);
      const double measured = std::max(ar / arc, arc / ar);
      ConstraintResult r = at_most(kind, measured, 1.0 + threshold);
      r.threshold = threshold;
      return r;
    }
    default:
      throw std::invalid_argument("eval_aspect: not an aspect constraint");
  }
}

ConstraintResult eval_min_bar_count(const BarLayout& m, double min_count) {
  return at_least(ConstraintKind::min_bar_count, static_cast<double>(m.shown), min_count);
}

}  // namespace viewstack
