#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "viewstack/data.hpp"

namespace viewstack {

inline constexpr int kSpecVersion = 1;

/// Landscape labels that view ids may not use.
inline constexpr const char* kFallbackLabel = "fallback";
inline constexpr const char* kErrorLabel = "error";

enum class ConstraintKind {
  min_circle_radius,
  min_area_size,
  min_hex_size,
  min_square_size,
  min_matrix_label_size,
  min_arc_label_size,
  max_overplotting,
  max_aspect_ratio_diff,
  min_aspect_ratio,
  max_aspect_ratio,
  min_bar_count,
};

/// Every kind, in declaration order.
std::span<const ConstraintKind> all_constraint_kinds();
/// JSON name, e.g. "minCircleRadius".
std::string_view to_string(ConstraintKind kind);
std::optional<ConstraintKind> constraint_kind_from_string(std::string_view name);

/// True when passing at a viewport implies passing at every viewport that is at
/// least as wide and at least as tall. False only for the aspect-ratio kinds.
bool is_monotone_in_size(ConstraintKind kind);

struct ConstraintSpec {
  ConstraintKind kind = ConstraintKind::min_aspect_ratio;
  /// Kind-specific units: px for sizes, a ratio for overplotting and aspect
  /// kinds, a count for min_bar_count. For min_circle_radius it is the
  /// minimum circle diameter.
  double threshold = 1.0;
  /// Share of elements allowed below the threshold (min_circle_radius only).
  double allowed_failure_fraction = 0.0;

  bool monotone_in_size() const { return is_monotone_in_size(kind); }
  bool operator==(const ConstraintSpec&) const = default;
};

enum class ViewType {
  circle_map,
  dorling_cartogram,
  choropleth,
  hex_map,
  waffle_chart,
  bar_chart,
  scatterplot,
  heatmap,
  adjacency_matrix,
  arc_diagram,
  node_link,
};

std::span<const ViewType> all_view_types();
std::string_view to_string(ViewType type);
std::optional<ViewType> view_type_from_string(std::string_view name);
DatasetKind required_dataset_kind(ViewType type);

/// Fixed table of which constraint kinds may be attached to which view types.
bool is_applicable(ConstraintKind kind, ViewType type);

enum class ProjectionKind { equirectangular, albers_conic };
enum class Orientation { horizontal, vertical };

std::string_view to_string(ProjectionKind kind);
std::string_view to_string(Orientation orientation);

/// Angles in degrees. Equirectangular uses center_lon and standard_parallel;
/// Albers uses center_lon, origin_lat and the two standard parallels.
struct ProjectionSpec {
  ProjectionKind kind = ProjectionKind::equirectangular;
  double center_lon = 0.0;
  double standard_parallel = 0.0;
  double origin_lat = 0.0;
  double parallel_1 = 29.5;
  double parallel_2 = 45.5;
  bool operator==(const ProjectionSpec&) const = default;
};

struct CircleMapParams {
  std::string value_field;
  std::string category_field;
  ProjectionSpec projection;
  /// Circle radius in content units per sqrt(value).
  double scale_factor = 1.0;
  double margin = 0.0;
  bool operator==(const CircleMapParams&) const = default;
};

struct DorlingParams {
  std::string value_field;
  std::string category_field;
  ProjectionSpec projection;
  double scale_factor = 1.0;
  double margin = 0.0;
  unsigned seed = 1;
  int max_iterations = 500;
  /// Allowed residual pairwise overlap, px.
  double epsilon = 0.5;
  bool operator==(const DorlingParams&) const = default;
};

struct ChoroplethParams {
  ProjectionSpec projection;
  std::string category_field;
  double margin = 0.0;
  bool operator==(const ChoroplethParams&) const = default;
};

struct HexMapParams {
  std::string category_field;
  double margin = 0.0;
  bool operator==(const HexMapParams&) const = default;
};

struct WaffleParams {
  std::string group_field;
  std::vector<std::string> group_order;
  std::string category_field;
  Orientation orientation = Orientation::vertical;
  double margin = 0.0;
  /// Gap between group blocks, in squares.
  int group_gap = 1;
  bool operator==(const WaffleParams&) const = default;
};

struct BarParams {
  std::string value_field;
  std::string label_field;
  std::string category_field;
  Orientation orientation = Orientation::vertical;
  double min_pitch = 14.0;
  double margin = 0.0;
  bool operator==(const BarParams&) const = default;
};

struct ScatterParams {
  std::string x_field;
  std::string y_field;
  std::string category_field;
  double mark_radius = 2.0;
  double margin = 20.0;
  bool operator==(const ScatterParams&) const = default;
};

struct HeatmapParams {
  std::string x_field;
  std::string y_field;
  int bins_x = 20;
  int bins_y = 20;
  double margin = 20.0;
  bool operator==(const HeatmapParams&) const = default;
};

struct MatrixParams {
  double label_gutter = 100.0;
  bool operator==(const MatrixParams&) const = default;
};

struct ArcParams {
  double label_gutter = 60.0;
  bool operator==(const ArcParams&) const = default;
};

struct NodeLinkParams {
  unsigned seed = 1;
  int iterations = 300;
  double margin = 10.0;
  double node_radius = 3.0;
  bool operator==(const NodeLinkParams&) const = default;
};

/// Alternative index matches ViewType.
using ViewParams = std::variant<CircleMapParams, DorlingParams, ChoroplethParams, HexMapParams, WaffleParams,
                                BarParams, ScatterParams, HeatmapParams, MatrixParams, ArcParams, NodeLinkParams>;

struct ViewSpec {
  std::string id;
  ViewParams params;
  std::vector<ConstraintSpec> constraints;

  ViewType type() const { return static_cast<ViewType>(params.index()); }
  bool operator==(const ViewSpec&) const = default;
};

/// Width/height ranges of a landscape, px.
struct LandscapeRegion {
  double w_min = 0.0;
  double w_max = 1600.0;
  double h_min = 0.0;
  double h_max = 1000.0;
  double step = 4.0;
  bool operator==(const LandscapeRegion&) const = default;
};

struct DatasetRef {
  DatasetKind kind = DatasetKind::geo;
  /// Relative paths resolve against the spec file's directory.
  std::string path;
  /// Inline dataset: GeoJSON / node-link object, or CSV text for tables.
  std::optional<nlohmann::json> inline_data;
  std::vector<std::string> value_fields;
  std::vector<std::string> category_fields;
  std::string hex_sidecar;
  std::string id_property;
  bool operator==(const DatasetRef&) const = default;
};

struct ResponsiveSpec {
  int spec_version = kSpecVersion;
  std::string name;
  DatasetRef dataset;
  LandscapeRegion landscape;
  /// Most preferred first.
  std::vector<ViewSpec> views;

  const ViewSpec* find_view(std::string_view id) const;
  bool operator==(const ResponsiveSpec&) const = default;
};

/// Throws ParseError on malformed JSON and ValidationError on schema violations
/// (unknown view type or constraint kind, empty stack, bad thresholds, ...).
ResponsiveSpec parse_spec(std::string_view text);

nlohmann::json to_json(const ResponsiveSpec& spec);
std::string serialize_spec(const ResponsiveSpec& spec);

enum class Severity { error, warning };

struct Diagnostic {
  Severity severity = Severity::error;
  std::string view_id;
  std::string message;
};

/// Checks a parsed spec against a dataset: field references, dataset kinds and
/// constraint applicability. An empty result means the pair is usable.
std::vector<Diagnostic> validate_spec(const ResponsiveSpec& spec, const Dataset& data);

bool has_errors(const std::vector<Diagnostic>& diagnostics);

/// Loads the dataset a spec refers to. `override_path` replaces the spec's
/// path; relative paths resolve against `base_dir`.
Dataset load_dataset(const DatasetRef& ref, const std::string& base_dir, const std::string& override_path = {},
                     std::vector<std::string>* warnings = nullptr);

/// Reads a whole file; throws IoError.
std::string read_file(const std::string& path);

}  // namespace viewstack
