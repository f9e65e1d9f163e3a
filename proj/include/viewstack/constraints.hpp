#pragma once

#include <optional>
#include <vector>

#include "viewstack/geometry.hpp"
#include "viewstack/layout.hpp"
#include "viewstack/spec.hpp"

namespace viewstack {

struct ConstraintResult {
  ConstraintKind kind = ConstraintKind::min_aspect_ratio;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  /// Signed slack in threshold units; positive means passing.
  double margin = 0.0;
};

/// measured = share of circles whose diameter is below `min_diameter`.
ConstraintResult eval_min_circle_radius(const CircleLayout& cl, double min_diameter, double allowed_failure_fraction);

/// measured = sqrt of the smallest rendered area.
ConstraintResult eval_min_area_size(const std::vector<double>& areas_px, double min_width);

ConstraintResult eval_min_hex_size(const HexLayout& g, double min_width);
ConstraintResult eval_min_square_size(const WaffleLayout& g, double min_width);

/// Matrix cell size or arc pitch against a minimum label size.
ConstraintResult eval_min_label_size(ConstraintKind kind, double label_size, double min_size);

/// Fraction of the smaller disk covered by the intersection of two disks whose
/// centres are `d` apart. Zero-radius disks count as points.
double disk_overlap(double r1, double r2, double d);

/// Mean pairwise overlap over all C(n,2) pairs. Uses a uniform grid with cell
/// size 2·max radius; the sum runs in (i, j) order so the result matches plain
/// pair enumeration bit for bit. Returns 0 for fewer than two marks.
double overplotting(const std::vector<Circle>& marks);

/// Same metric, but stops as soon as the comparison with `limit` is settled.
/// When `exceeded`, `value` is a lower bound above `limit`; otherwise it is an
/// upper bound no greater than `limit` (the exact value when nothing could be
/// settled early). Either way `value <= limit` iff the exact metric is.
struct BoundedOverplotting {
  double value = 0.0;
  bool exceeded = false;
};
BoundedOverplotting overplotting_bounded(const std::vector<Circle>& marks, double limit);

ConstraintResult eval_max_overplotting(double measured, double max_value);

/// Aspect kinds. `content` is required for max_aspect_ratio_diff.
ConstraintResult eval_aspect(ConstraintKind kind, const Viewport& v, const std::optional<ContentBox>& content,
                             double threshold);

ConstraintResult eval_min_bar_count(const BarLayout& m, double min_count);

}  // namespace viewstack
