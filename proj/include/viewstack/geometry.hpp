#pragma once

#include <stdexcept>

namespace viewstack {

/// A container size in CSS pixels. Both dimensions are strictly positive.
class Viewport {
 public:
  Viewport(double width, double height);

  double width() const { return width_; }
  double height() const { return height_; }

  bool operator==(const Viewport&) const = default;

 private:
  double width_;
  double height_;
};

/// Intrinsic size of a visualization in its own content units (e.g. a
/// projected map's bounding box).
class ContentBox {
 public:
  ContentBox(double width, double height);

  double width() const { return width_; }
  double height() const { return height_; }

  bool operator==(const ContentBox&) const = default;

 private:
  double width_;
  double height_;
};

/// Uniform scale plus the offsets that center scaled content in a viewport.
struct FitResult {
  double scale = 1.0;
  double offset_x = 0.0;
  double offset_y = 0.0;
};

double aspect_ratio(const Viewport& v);
double aspect_ratio(const ContentBox& c);

/// Largest uniform scale at which `c` fits inside `v`, centered.
FitResult fit_content(const Viewport& v, const ContentBox& c);

}  // namespace viewstack
