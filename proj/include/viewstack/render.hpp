#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "viewstack/landscape.hpp"

namespace viewstack {

enum class ImageFormat { png, svg };

std::optional<ImageFormat> image_format_from_string(std::string_view name);

struct RenderOptions {
  /// Image pixels per landscape cell.
  int cell_px = 2;
  /// Colours for views in stack order ("#rrggbb"); cycles when short.
  std::vector<std::string> palette;
  /// Current viewport (width, height) to mark on the landscape.
  std::optional<Point> marker;
  /// Draw breakpoint lines (SVG only).
  bool breakpoints = true;
};

/// Fixed colours for the reserved labels.
inline constexpr const char* kFallbackColor = "#d9d9d9";
inline constexpr const char* kErrorColor = "#000000";

/// Colour of label `index` in a landscape.
std::string label_color(const ViewLandscape& l, std::size_t index, const std::vector<std::string>& palette = {});

/// Deterministic image bytes. Throws std::runtime_error if encoding fails.
std::string render_landscape(const ViewLandscape& l, ImageFormat format, const RenderOptions& options = {});

}  // namespace viewstack
