#include "viewstack/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace viewstack {

namespace {

void require_positive(double w, double h, const char* what) {
  if (!(std::isfinite(w) && std::isfinite(h) && w > 0.0 && h > 0.0)) {
    throw std::invalid_argument(std::string(what) + " dimensions must be positive and finite, got " +
                                std::to_string(w) + "x" + std::to_string(h));
  }
}

}  // namespace

Viewport::Viewport(double width, double height) : width_(width), height_(height) {
  require_positive(width, height, "viewport");
}

ContentBox::ContentBox(double width, double height) : width_(width), height_(height) {
  require_positive(width, height, "content box");
}

double aspect_ratio(const Viewport& v) { return v.width() / v.height(); }

double aspect_ratio(const ContentBox& c) { return c.width() / c.height(); }

FitResult fit_content(const Viewport& v, const ContentBox& c) {
  FitResult fit;
  fit.scale = std::min(v.width() / c.width(), v.height() / c.height());
  fit.offset_x = (v.width() - fit.scale * c.width()) / 2.0;
  fit.offset_y = (v.height() - fit.scale * c.height()) / 2.0;
  return fit;
}

}  // namespace viewstack
