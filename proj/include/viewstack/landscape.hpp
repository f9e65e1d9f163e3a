#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "viewstack/engine.hpp"
#include "viewstack/projection.hpp"
#include "viewstack/spec.hpp"

namespace viewstack {

enum class LandscapeMode { full_scan, monotone_fast };

std::string_view to_string(LandscapeMode mode);
std::optional<LandscapeMode> landscape_mode_from_string(std::string_view name);

struct LandscapeOptions {
  LandscapeMode mode = LandscapeMode::monotone_fast;
  /// Worker threads; 0 means one per hardware thread.
  unsigned threads = 0;
};

/// Number of cells along one axis: ceil(extent / step).
std::size_t grid_count(double lo, double hi, double step);

/// Labelled raster over width × height. Column index runs along width, row
/// index along height, row 0 at the smallest height. Cell (c, r) is sampled at
/// its minimum corner, clamped to at least 1 px.
struct ViewLandscape {
  LandscapeRegion region;
  std::size_t cols = 0;
  std::size_t rows = 0;
  /// View ids in stack order, then the fallback and error labels.
  std::vector<std::string> labels;
  /// Row-major label indices.
  std::vector<std::uint16_t> cells;
  Provenance provenance;
  /// Layout failures met while scanning, deduplicated.
  std::vector<std::string> errors;

  std::uint16_t at(std::size_t col, std::size_t row) const { return cells[row * cols + col]; }
  const std::string& label_at(std::size_t col, std::size_t row) const { return labels[at(col, row)]; }
  double sample_width(std::size_t col) const;
  double sample_height(std::size_t row) const;
  /// Cell edge coordinates, clipped to the region.
  double edge_x(std::size_t k) const;
  double edge_y(std::size_t k) const;
  std::uint16_t fallback_label() const { return static_cast<std::uint16_t>(labels.size() - 2); }
  std::uint16_t error_label() const { return static_cast<std::uint16_t>(labels.size() - 1); }

  bool operator==(const ViewLandscape&) const = default;
};

/// Uses the engine's spec region. Throws ValidationError for a bad region.
ViewLandscape compute_landscape(const Engine& engine, const LandscapeOptions& options = {});
ViewLandscape compute_landscape(const Engine& engine, const LandscapeRegion& region,
                                const LandscapeOptions& options = {});

struct Boundary {
  std::string a;
  std::string b;
  std::vector<std::vector<Point>> polylines;
};

struct BreakpointSet {
  /// One entry per unordered label pair that shares an edge, sorted by (a, b).
  std::vector<Boundary> boundaries;
  /// Share of cells per label, including zero shares.
  std::map<std::string, double> area_shares;
};

BreakpointSet extract_breakpoints(const ViewLandscape& l);

struct DiffReport {
  double changed_fraction = 0.0;
  std::size_t changed_cells = 0;
  std::size_t total_cells = 0;
  /// b's share minus a's share per label.
  std::map<std::string, double> area_delta;
};

/// Throws ValidationError when the regions or steps differ.
DiffReport diff_landscape(const ViewLandscape& a, const ViewLandscape& b);

nlohmann::json to_json(const ViewLandscape& l);
nlohmann::json to_json(const BreakpointSet& b);
nlohmann::json to_json(const DiffReport& d);

/// Inverse of to_json(ViewLandscape); throws ParseError/ValidationError.
ViewLandscape landscape_from_json(const nlohmann::json& j);

}  // namespace viewstack
