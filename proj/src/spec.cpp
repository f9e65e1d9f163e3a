#include "viewstack/spec.hpp"

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "viewstack/errors.hpp"

namespace viewstack {

using nlohmann::json;

namespace {

constexpr std::array kConstraintKinds{
    ConstraintKind::min_circle_radius,     ConstraintKind::min_area_size,
    ConstraintKind::min_hex_size,          ConstraintKind::min_square_size,
    ConstraintKind::min_matrix_label_size, ConstraintKind::min_arc_label_size,
    ConstraintKind::max_overplotting,      ConstraintKind::max_aspect_ratio_diff,
    ConstraintKind::min_aspect_ratio,      ConstraintKind::max_aspect_ratio,
    ConstraintKind::min_bar_count,
};

constexpr std::array kViewTypes{
    ViewType::circle_map, ViewType::dorling_cartogram, ViewType::choropleth,       ViewType::hex_map,
    ViewType::waffle_chart, ViewType::bar_chart,       ViewType::scatterplot,      ViewType::heatmap,
    ViewType::adjacency_matrix, ViewType::arc_diagram, ViewType::node_link,
};

std::string valid_names(auto&& items) {
  std::string out;
  for (auto item : items) {
    if (!out.empty()) out += ", ";
    out += to_string(item);
  }
  return out;
}

/// Reads typed values out of a params object and rejects unknown keys.
class ParamReader {
 public:
  ParamReader(const json& obj, std::string context) : obj_(obj), context_(std::move(context)) {
    if (!obj_.is_object()) fail("params must be an object");
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ValidationError(context_ + ": " + msg); }

  bool has(const std::string& key) const { return obj_.contains(key); }

  std::string required_string(const std::string& key) {
    if (!has(key)) fail("missing required parameter '" + key + "'");
    return string(key, "");
  }

  std::string string(const std::string& key, const std::string& fallback) {
    used_.insert(key);
    if (!has(key)) return fallback;
    if (!obj_[key].is_string()) fail("parameter '" + key + "' must be a string");
    return obj_[key].get<std::string>();
  }

  double required_number(const std::string& key) {
    if (!has(key)) fail("missing required parameter '" + key + "'");
    return number(key, 0.0);
  }

  double number(const std::string& key, double fallback) {
    used_.insert(key);
    if (!has(key)) return fallback;
    if (!obj_[key].is_number() || !std::isfinite(obj_[key].get<double>())) {
      fail("parameter '" + key + "' must be a finite number");
    }
    return obj_[key].get<double>();
  }

  int integer(const std::string& key, int fallback) {
    used_.insert(key);
    if (!has(key)) return fallback;
    if (!obj_[key].is_number_integer()) fail("parameter '" + key + "' must be an integer");
    return obj_[key].get<int>();
  }

  std::vector<std::string> string_list(const std::string& key) {
    used_.insert(key);
    if (!has(key)) return {};
    if (!obj_[key].is_array()) fail("parameter '" + key + "' must be an array of strings");
    std::vector<std::string> out;
    for (const auto& v : obj_[key]) {
      if (!v.is_string()) fail("parameter '" + key + "' must be an array of strings");
      out.push_back(v.get<std::string>());
    }
    return out;
  }

  Orientation orientation(const std::string& key) {
    const std::string v = required_string(key);
    if (v == "horizontal") return Orientation::horizontal;
    if (v == "vertical") return Orientation::vertical;
    fail("orientation must be 'horizontal' or 'vertical', got '" + v + "'");
  }

  ProjectionSpec projection(const std::string& key) {
    used_.insert(key);
    if (!has(key)) fail("missing required parameter '" + key + "'");
    ParamReader p(obj_[key], context_ + " projection");
    ProjectionSpec spec;
    const std::string name = p.required_string("name");
    if (name == "equirectangular") {
      spec.kind = ProjectionKind::equirectangular;
    } else if (name == "albers_conic") {
      spec.kind = ProjectionKind::albers_conic;
    } else {
      p.fail("unknown projection '" + name + "' (valid: equirectangular, albers_conic)");
    }
    spec.center_lon = p.number("center_lon", spec.center_lon);
    spec.standard_parallel = p.number("standard_parallel", spec.standard_parallel);
    spec.origin_lat = p.number("origin_lat", spec.origin_lat);
    spec.parallel_1 = p.number("parallel_1", spec.parallel_1);
    spec.parallel_2 = p.number("parallel_2", spec.parallel_2);
    p.finish();
    if (spec.kind == ProjectionKind::albers_conic) {
      const double n = (std::sin(spec.parallel_1 * M_PI / 180.0) + std::sin(spec.parallel_2 * M_PI / 180.0)) / 2.0;
      if (spec.parallel_1 == spec.parallel_2 || std::abs(n) < 1e-9) {
        p.fail("albers_conic needs two distinct, non-symmetric standard parallels");
      }
    }
    if (std::abs(spec.standard_parallel) >= 90.0) p.fail("standard_parallel must lie in (-90, 90)");
    return spec;
  }

  void finish() const {
    std::vector<std::string> unknown;
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!used_.count(it.key())) unknown.push_back(it.key());
    }
    if (!unknown.empty()) {
      std::string list;
      for (const auto& k : unknown) list += (list.empty() ? "" : ", ") + k;
      fail("unknown parameter(s): " + list);
    }
  }

 private:
  json obj_;
  std::string context_;
  std::set<std::string> used_;
};

void require(bool ok, ParamReader& r, const std::string& msg) {
  if (!ok) r.fail(msg);
}

ViewParams parse_params(ViewType type, const json& obj, const std::string& context) {
  ParamReader r(obj.is_null() ? json::object() : obj, context);
  ViewParams out;
  switch (type) {
    case ViewType::circle_map: {
      CircleMapParams p;
      p.value_field = r.required_string("value_field");
      p.category_field = r.string("category_field", "");
      p.projection = r.projection("projection");
      p.scale_factor = r.required_number("scale_factor");
      p.margin = r.number("margin", p.margin);
      require(p.scale_factor > 0, r, "scale_factor must be positive");
      require(p.margin >= 0, r, "margin must be non-negative");
      out = p;
      break;
    }
    case ViewType::dorling_cartogram: {
      DorlingParams p;
      p.value_field = r.required_string("value_field");
      p.category_field = r.string("category_field", "");
      p.projection = r.projection("projection");
      p.scale_factor = r.required_number("scale_factor");
      p.margin = r.number("margin", p.margin);
      p.seed = static_cast<unsigned>(r.integer("seed", static_cast<int>(p.seed)));
      p.max_iterations = r.integer("max_iterations", p.max_iterations);
      p.epsilon = r.number("epsilon", p.epsilon);
      require(p.scale_factor > 0, r, "scale_factor must be positive");
      require(p.margin >= 0, r, "margin must be non-negative");
      require(p.max_iterations >= 0, r, "max_iterations must be non-negative");
      require(p.epsilon > 0, r, "epsilon must be positive");
      out = p;
      break;
    }
    case ViewType::choropleth: {
      ChoroplethParams p;
      p.projection = r.projection("projection");
      p.category_field = r.string("category_field", "");
      p.margin = r.number("margin", p.margin);
      require(p.margin >= 0, r, "margin must be non-negative");
      out = p;
      break;
    }
    case ViewType::hex_map: {
      HexMapParams p;
      p.category_field = r.string("category_field", "");
      p.margin = r.number("margin", p.margin);
      require(p.margin >= 0, r, "margin must be non-negative");
      out = p;
      break;
    }
    case ViewType::waffle_chart: {
      WaffleParams p;
      p.group_field = r.required_string("group_field");
      p.group_order = r.string_list("group_order");
      p.category_field = r.string("category_field", "");
      p.orientation = r.orientation("orientation");
      p.margin = r.number("margin", p.margin);
      p.group_gap = r.integer("group_gap", p.group_gap);
      require(p.margin >= 0, r, "margin must be non-negative");
      require(p.group_gap >= 0, r, "group_gap must be non-negative");
      out = p;
      break;
    }
    case ViewType::bar_chart: {
      BarParams p;
      p.value_field = r.required_string("value_field");
      p.label_field = r.required_string("label_field");
      p.category_field = r.string("category_field", "");
      p.orientation = r.orientation("orientation");
      p.min_pitch = r.number("min_pitch", p.min_pitch);
      p.margin = r.number("margin", p.margin);
      require(p.min_pitch > 0, r, "min_pitch must be positive");
      require(p.margin >= 0, r, "margin must be non-negative");
      out = p;
      break;
    }
    case ViewType::scatterplot: {
      ScatterParams p;
      p.x_field = r.required_string("x_field");
      p.y_field = r.required_string("y_field");
      p.category_field = r.string("category_field", "");
      p.mark_radius = r.required_number("mark_radius");
      p.margin = r.number("margin", p.margin);
      require(p.mark_radius >= 0, r, "mark_radius must be non-negative");
      require(p.margin >= 0, r, "margin must be non-negative");
      out = p;
      break;
    }
    case ViewType::heatmap: {
      HeatmapParams p;
      p.x_field = r.required_string("x_field");
      p.y_field = r.required_string("y_field");
      p.bins_x = r.integer("bins_x", p.bins_x);
      p.bins_y = r.integer("bins_y", p.bins_y);
      p.margin = r.number("margin", p.margin);
      require(p.bins_x >= 1 && p.bins_y >= 1, r, "bins_x and bins_y must be at least 1");
      require(p.margin >= 0, r, "margin must be non-negative");
      out = p;
      break;
    }
    case ViewType::adjacency_matrix: {
      MatrixParams p;
      p.label_gutter = r.number("label_gutter", p.label_gutter);
      require(p.label_gutter >= 0, r, "label_gutter must be non-negative");
      out = p;
      break;
    }
    case ViewType::arc_diagram: {
      ArcParams p;
      p.label_gutter = r.number("label_gutter", p.label_gutter);
      require(p.label_gutter >= 0, r, "label_gutter must be non-negative");
      out = p;
      break;
    }
    case ViewType::node_link: {
      NodeLinkParams p;
      p.seed = static_cast<unsigned>(r.integer("seed", static_cast<int>(p.seed)));
      p.iterations = r.integer("iterations", p.iterations);
      p.margin = r.number("margin", p.margin);
      p.node_radius = r.number("node_radius", p.node_radius);
      require(p.iterations >= 0, r, "iterations must be non-negative");
      require(p.margin >= 0 && p.node_radius >= 0, r, "margin and node_radius must be non-negative");
      out = p;
      break;
    }
  }
  r.finish();
  return out;
}

json projection_json(const ProjectionSpec& p) {
  json j{{"name", to_string(p.kind)}, {"center_lon", p.center_lon}};
  if (p.kind == ProjectionKind::equirectangular) {
    j["standard_parallel"] = p.standard_parallel;
  } else {
    j["origin_lat"] = p.origin_lat;
    j["parallel_1"] = p.parallel_1;
    j["parallel_2"] = p.parallel_2;
  }
  return j;
}

json params_json(const ViewParams& params) {
  return std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, CircleMapParams>) {
          return {{"value_field", p.value_field}, {"category_field", p.category_field},
                  {"projection", projection_json(p.projection)}, {"scale_factor", p.scale_factor},
                  {"margin", p.margin}};
        } else if constexpr (std::is_same_v<T, DorlingParams>) {
          return {{"value_field", p.value_field}, {"category_field", p.category_field},
                  {"projection", projection_json(p.projection)}, {"scale_factor", p.scale_factor},
                  {"margin", p.margin}, {"seed", p.seed}, {"max_iterations", p.max_iterations},
                  {"epsilon", p.epsilon}};
        } else if constexpr (std::is_same_v<T, ChoroplethParams>) {
          return {{"projection", projection_json(p.projection)}, {"category_field", p.category_field},
                  {"margin", p.margin}};
        } else if constexpr (std::is_same_v<T, HexMapParams>) {
          return {{"category_field", p.category_field}, {"margin", p.margin}};
        } else if constexpr (std::is_same_v<T, WaffleParams>) {
          return {{"group_field", p.group_field}, {"group_order", p.group_order},
                  {"category_field", p.category_field}, {"orientation", to_string(p.orientation)},
                  {"margin", p.margin}, {"group_gap", p.group_gap}};
        } else if constexpr (std::is_same_v<T, BarParams>) {
          return {{"value_field", p.value_field}, {"label_field", p.label_field},
                  {"category_field", p.category_field}, {"orientation", to_string(p.orientation)},
                  {"min_pitch", p.min_pitch}, {"margin", p.margin}};
        } else if constexpr (std::is_same_v<T, ScatterParams>) {
          return {{"x_field", p.x_field}, {"y_field", p.y_field}, {"category_field", p.category_field},
                  {"mark_radius", p.mark_radius}, {"margin", p.margin}};
        } else if constexpr (std::is_same_v<T, HeatmapParams>) {
          return {{"x_field", p.x_field}, {"y_field", p.y_field}, {"bins_x", p.bins_x},
                  {"bins_y", p.bins_y}, {"margin", p.margin}};
        } else if constexpr (std::is_same_v<T, MatrixParams> || std::is_same_v<T, ArcParams>) {
          return {{"label_gutter", p.label_gutter}};
        } else {
          return {{"seed", p.seed}, {"iterations", p.iterations}, {"margin", p.margin},
                  {"node_radius", p.node_radius}};
        }
      },
      params);
}

ConstraintSpec parse_constraint(const json& j, const std::string& view_id) {
  const std::string ctx = "view '" + view_id + "' constraint";
  if (!j.is_object()) throw ValidationError(ctx + " must be an object");
  const std::string name = j.value("kind", "");
  auto kind = constraint_kind_from_string(name);
  if (!kind) {
    throw ValidationError(ctx + ": unknown constraint kind '" + name + "' (valid kinds: " +
                              valid_names(kConstraintKinds) + ")",
                          {name});
  }
  ConstraintSpec c;
  c.kind = *kind;
  if (!j.contains("threshold") || !j["threshold"].is_number()) {
    throw ValidationError(ctx + " " + name + ": numeric 'threshold' required");
  }
  c.threshold = j["threshold"].get<double>();
  if (!std::isfinite(c.threshold) || c.threshold <= 0.0) {
    throw ValidationError(ctx + " " + name + ": threshold must be positive, got " + j["threshold"].dump());
  }
  if (c.kind == ConstraintKind::max_overplotting && c.threshold > 1.0) {
    throw ValidationError(ctx + " " + name + ": threshold must lie in (0, 1]");
  }
  if (j.contains("allowedFailureFraction")) {
    if (!j["allowedFailureFraction"].is_number()) {
      throw ValidationError(ctx + " " + name + ": allowedFailureFraction must be a number");
    }
    c.allowed_failure_fraction = j["allowedFailureFraction"].get<double>();
    if (!(c.allowed_failure_fraction >= 0.0 && c.allowed_failure_fraction < 1.0)) {
      throw ValidationError(ctx + " " + name + ": allowedFailureFraction must lie in [0, 1)");
    }
    if (c.allowed_failure_fraction != 0.0 && c.kind != ConstraintKind::min_circle_radius) {
      throw ValidationError(ctx + " " + name + ": allowedFailureFraction only applies to minCircleRadius");
    }
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() != "kind" && it.key() != "threshold" && it.key() != "allowedFailureFraction") {
      throw ValidationError(ctx + " " + name + ": unknown key '" + it.key() + "'");
    }
  }
  return c;
}

std::pair<double, double> parse_range(const json& j, const char* key, std::pair<double, double> fallback) {
  if (!j.contains(key)) return fallback;
  const auto& r = j[key];
  if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) {
    throw ValidationError(std::string("landscape.") + key + " must be [min, max]");
  }
  return {r[0].get<double>(), r[1].get<double>()};
}

std::vector<std::string> string_array(const json& j, const char* key) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;
  if (!j[key].is_array()) throw ValidationError(std::string("dataset.") + key + " must be an array of strings");
  for (const auto& v : j[key]) {
    if (!v.is_string()) throw ValidationError(std::string("dataset.") + key + " must be an array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

std::span<const ConstraintKind> all_constraint_kinds() { return kConstraintKinds; }

std::string_view to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::min_circle_radius: return "minCircleRadius";
    case ConstraintKind::min_area_size: return "minAreaSize";
    case ConstraintKind::min_hex_size: return "minHexSize";
    case ConstraintKind::min_square_size: return "minSquareSize";
    case ConstraintKind::min_matrix_label_size: return "minAdjacencyMatrixLabelSize";
    case ConstraintKind::min_arc_label_size: return "minArcDiagramLabelSize";
    case ConstraintKind::max_overplotting: return "maxOverplotting";
    case ConstraintKind::max_aspect_ratio_diff: return "maxAspectRatioDiff";
    case ConstraintKind::min_aspect_ratio: return "minAspectRatio";
    case ConstraintKind::max_aspect_ratio: return "maxAspectRatio";
    case ConstraintKind::min_bar_count: return "minBarCount";
  }
  return "unknown";
}

std::optional<ConstraintKind> constraint_kind_from_string(std::string_view name) {
  for (auto k : kConstraintKinds) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

bool is_monotone_in_size(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::max_aspect_ratio_diff:
    case ConstraintKind::min_aspect_ratio:
    case ConstraintKind::max_aspect_ratio:
      return false;
    default:
      return true;
  }
}

std::span<const ViewType> all_view_types() { return kViewTypes; }

std::string_view to_string(ViewType type) {
  switch (type) {
    case ViewType::circle_map: return "circle_map";
    case ViewType::dorling_cartogram: return "dorling_cartogram";
    case ViewType::choropleth: return "choropleth";
    case ViewType::hex_map: return "hex_map";
    case ViewType::waffle_chart: return "waffle_chart";
    case ViewType::bar_chart: return "bar_chart";
    case ViewType::scatterplot: return "scatterplot";
    case ViewType::heatmap: return "heatmap";
    case ViewType::adjacency_matrix: return "adjacency_matrix";
    case ViewType::arc_diagram: return "arc_diagram";
    case ViewType::node_link: return "node_link";
  }
  return "unknown";
}

std::optional<ViewType> view_type_from_string(std::string_view name) {
  for (auto t : kViewTypes) {
    if (to_string(t) == name) return t;
  }
  return std::nullopt;
}

DatasetKind required_dataset_kind(ViewType type) {
  switch (type) {
    case ViewType::circle_map:
    case ViewType::dorling_cartogram:
    case ViewType::choropleth:
    case ViewType::hex_map:
    case ViewType::waffle_chart:
      return DatasetKind::geo;
    case ViewType::bar_chart:
    case ViewType::scatterplot:
    case ViewType::heatmap:
      return DatasetKind::table;
    case ViewType::adjacency_matrix:
    case ViewType::arc_diagram:
    case ViewType::node_link:
      return DatasetKind::network;
  }
  return DatasetKind::table;
}

bool is_applicable(ConstraintKind kind, ViewType type) {
  switch (kind) {
    case ConstraintKind::min_circle_radius:
      return type == ViewType::circle_map || type == ViewType::dorling_cartogram;
    case ConstraintKind::min_area_size: return type == ViewType::choropleth;
    case ConstraintKind::min_hex_size: return type == ViewType::hex_map;
    case ConstraintKind::min_square_size: return type == ViewType::waffle_chart;
    case ConstraintKind::min_matrix_label_size: return type == ViewType::adjacency_matrix;
    case ConstraintKind::min_arc_label_size: return type == ViewType::arc_diagram;
    case ConstraintKind::max_overplotting: return type == ViewType::scatterplot;
    case ConstraintKind::max_aspect_ratio_diff:
      return type == ViewType::circle_map || type == ViewType::dorling_cartogram || type == ViewType::choropleth ||
             type == ViewType::hex_map || type == ViewType::adjacency_matrix;
    case ConstraintKind::min_aspect_ratio:
    case ConstraintKind::max_aspect_ratio:
      return true;
    case ConstraintKind::min_bar_count: return type == ViewType::bar_chart;
  }
  return false;
}

std::string_view to_string(ProjectionKind kind) {
  return kind == ProjectionKind::equirectangular ? "equirectangular" : "albers_conic";
}

std::string_view to_string(Orientation orientation) {
  return orientation == Orientation::horizontal ? "horizontal" : "vertical";
}

const ViewSpec* ResponsiveSpec::find_view(std::string_view id) const {
  for (const auto& v : views) {
    if (v.id == id) return &v;
  }
  return nullptr;
}

ResponsiveSpec parse_spec(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("spec: ") + e.what(), std::min(text.size(), e.byte > 0 ? e.byte - 1 : 0));
  }
  if (!root.is_object()) throw ValidationError("spec root must be an object");

  ResponsiveSpec spec;
  spec.spec_version = root.value("spec_version", kSpecVersion);
  if (spec.spec_version != kSpecVersion) {
    throw ValidationError("unsupported spec_version " + std::to_string(spec.spec_version));
  }
  spec.name = root.value("name", "");

  if (root.contains("dataset")) {
    const auto& d = root["dataset"];
    if (!d.is_object()) throw ValidationError("'dataset' must be an object");
    const std::string kind = d.value("kind", "geo");
    if (kind == "geo") spec.dataset.kind = DatasetKind::geo;
    else if (kind == "network") spec.dataset.kind = DatasetKind::network;
    else if (kind == "table") spec.dataset.kind = DatasetKind::table;
    else throw ValidationError("dataset.kind must be geo, network or table, got '" + kind + "'");
    spec.dataset.path = d.value("path", "");
    if (d.contains("inline")) spec.dataset.inline_data = d["inline"];
    spec.dataset.value_fields = string_array(d, "value_fields");
    spec.dataset.category_fields = string_array(d, "category_fields");
    spec.dataset.hex_sidecar = d.value("hex_sidecar", "");
    spec.dataset.id_property = d.value("id_property", "");
  }

  if (root.contains("landscape")) {
    const auto& l = root["landscape"];
    if (!l.is_object()) throw ValidationError("'landscape' must be an object");
    auto [w0, w1] = parse_range(l, "width", {spec.landscape.w_min, spec.landscape.w_max});
    auto [h0, h1] = parse_range(l, "height", {spec.landscape.h_min, spec.landscape.h_max});
    spec.landscape = {w0, w1, h0, h1, l.value("step", spec.landscape.step)};
    const auto& r = spec.landscape;
    if (!(r.w_max > r.w_min && r.h_max > r.h_min && r.w_min >= 0 && r.h_min >= 0)) {
      throw ValidationError("landscape region must have positive extent");
    }
    if (!(r.step >= 1.0)) throw ValidationError("landscape step must be at least 1 px");
  }

  if (!root.contains("views") || !root["views"].is_array()) throw ValidationError("spec needs a 'views' array");
  if (root["views"].empty()) throw ValidationError("view stack is empty: at least one view is required");
  std::set<std::string> ids;
  for (const auto& v : root["views"]) {
    if (!v.is_object()) throw ValidationError("each view must be an object");
    ViewSpec view;
    view.id = v.value("id", "");
    if (view.id.empty()) throw ValidationError("every view needs a non-empty 'id'");
    if (view.id == kFallbackLabel || view.id == kErrorLabel) {
      throw ValidationError("view id '" + view.id + "' is reserved", {view.id});
    }
    if (!ids.insert(view.id).second) throw ValidationError("duplicate view id '" + view.id + "'", {view.id});
    const std::string type_name = v.value("type", "");
    auto type = view_type_from_string(type_name);
    if (!type) {
      throw ValidationError("view '" + view.id + "': unknown view type '" + type_name + "' (valid types: " +
                                valid_names(kViewTypes) + ")",
                            {type_name});
    }
    view.params = parse_params(*type, v.contains("params") ? v["params"] : json::object(), "view '" + view.id + "'");
    if (v.contains("constraints")) {
      if (!v["constraints"].is_array()) throw ValidationError("view '" + view.id + "': constraints must be an array");
      for (const auto& c : v["constraints"]) view.constraints.push_back(parse_constraint(c, view.id));
    }
    spec.views.push_back(std::move(view));
  }
  return spec;
}

json to_json(const ResponsiveSpec& spec) {
  json dataset{{"kind", to_string(spec.dataset.kind)},
               {"value_fields", spec.dataset.value_fields},
               {"category_fields", spec.dataset.category_fields}};
  if (!spec.dataset.path.empty()) dataset["path"] = spec.dataset.path;
  if (spec.dataset.inline_data) dataset["inline"] = *spec.dataset.inline_data;
  if (!spec.dataset.hex_sidecar.empty()) dataset["hex_sidecar"] = spec.dataset.hex_sidecar;
  if (!spec.dataset.id_property.empty()) dataset["id_property"] = spec.dataset.id_property;

  json views = json::array();
  for (const auto& v : spec.views) {
    json constraints = json::array();
    for (const auto& c : v.constraints) {
      json cj{{"kind", to_string(c.kind)}, {"threshold", c.threshold}};
      if (c.allowed_failure_fraction != 0.0) cj["allowedFailureFraction"] = c.allowed_failure_fraction;
      constraints.push_back(cj);
    }
    views.push_back({{"id", v.id}, {"type", to_string(v.type())}, {"params", params_json(v.params)},
                     {"constraints", constraints}});
  }
  const auto& r = spec.landscape;
  return {{"spec_version", spec.spec_version},
          {"name", spec.name},
          {"dataset", dataset},
          {"landscape", {{"width", {r.w_min, r.w_max}}, {"height", {r.h_min, r.h_max}}, {"step", r.step}}},
          {"views", views}};
}

std::string serialize_spec(const ResponsiveSpec& spec) { return to_json(spec).dump(2); }

namespace {

void check_geo_number(const GeoFeatureCollection& geo, const std::string& field, const std::string& view_id,
                      std::vector<Diagnostic>& out) {
  std::size_t missing = 0;
  std::string first;
  for (std::size_t i = 0; i < geo.features.size(); ++i) {
    auto it = geo.features[i].properties.find(field);
    if (it == geo.features[i].properties.end() || !std::holds_alternative<double>(it->second)) {
      if (!missing++) first = geo.features[i].id;
    }
  }
  if (missing) {
    out.push_back({Severity::error, view_id,
                   "value field '" + field + "' is missing or non-numeric on " + std::to_string(missing) +
                       " feature(s), e.g. " + first});
  }
}

void check_geo_field(const GeoFeatureCollection& geo, const std::string& field, const std::string& view_id,
                     std::vector<Diagnostic>& out) {
  if (!field.empty() && !geo.has_property(field)) {
    out.push_back({Severity::error, view_id, "dataset has no property '" + field + "'"});
  }
}

void check_column(const Table& table, const std::string& field, bool numeric, const std::string& view_id,
                  std::vector<Diagnostic>& out) {
  if (field.empty()) return;
  auto idx = table.column_index(field);
  if (!idx) {
    out.push_back({Severity::error, view_id, "dataset has no column '" + field + "'"});
  } else if (numeric && table.columns[*idx].kind != ColumnKind::numeric) {
    out.push_back({Severity::error, view_id, "column '" + field + "' is not numeric"});
  }
}

}  // namespace

std::vector<Diagnostic> validate_spec(const ResponsiveSpec& spec, const Dataset& data) {
  std::vector<Diagnostic> out;
  const DatasetKind have = kind_of(data);
  for (const auto& view : spec.views) {
    for (const auto& c : view.constraints) {
      if (!is_applicable(c.kind, view.type())) {
        out.push_back({Severity::error, view.id,
                       "constraint " + std::string(to_string(c.kind)) + " does not apply to view type " +
                           std::string(to_string(view.type()))});
      }
    }
    const DatasetKind need = required_dataset_kind(view.type());
    const bool table_from_geo_ok = view.type() == ViewType::bar_chart && have == DatasetKind::geo;
    if (need != have && !table_from_geo_ok) {
      out.push_back({Severity::error, view.id,
                     std::string(to_string(view.type())) + " needs a " + std::string(to_string(need)) +
                         " dataset, got " + std::string(to_string(have))});
      continue;
    }
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, CircleMapParams> || std::is_same_v<T, DorlingParams>) {
            const auto& geo = std::get<GeoFeatureCollection>(data);
            check_geo_number(geo, p.value_field, view.id, out);
            check_geo_field(geo, p.category_field, view.id, out);
          } else if constexpr (std::is_same_v<T, ChoroplethParams>) {
            check_geo_field(std::get<GeoFeatureCollection>(data), p.category_field, view.id, out);
          } else if constexpr (std::is_same_v<T, HexMapParams>) {
            const auto& geo = std::get<GeoFeatureCollection>(data);
            if (!geo.has_hex_coords()) {
              out.push_back({Severity::error, view.id, "hex_map needs hex positions for every feature"});
            }
            check_geo_field(geo, p.category_field, view.id, out);
          } else if constexpr (std::is_same_v<T, WaffleParams>) {
            const auto& geo = std::get<GeoFeatureCollection>(data);
            check_geo_field(geo, p.group_field, view.id, out);
            check_geo_field(geo, p.category_field, view.id, out);
          } else if constexpr (std::is_same_v<T, BarParams>) {
            if (have == DatasetKind::geo) {
              const auto& geo = std::get<GeoFeatureCollection>(data);
              check_geo_number(geo, p.value_field, view.id, out);
              if (p.label_field != "id") check_geo_field(geo, p.label_field, view.id, out);
              check_geo_field(geo, p.category_field, view.id, out);
            } else {
              const auto& t = std::get<Table>(data);
              check_column(t, p.value_field, true, view.id, out);
              check_column(t, p.label_field, false, view.id, out);
              check_column(t, p.category_field, false, view.id, out);
            }
          } else if constexpr (std::is_same_v<T, ScatterParams>) {
            const auto& t = std::get<Table>(data);
            check_column(t, p.x_field, true, view.id, out);
            check_column(t, p.y_field, true, view.id, out);
            check_column(t, p.category_field, false, view.id, out);
          } else if constexpr (std::is_same_v<T, HeatmapParams>) {
            const auto& t = std::get<Table>(data);
            check_column(t, p.x_field, true, view.id, out);
            check_column(t, p.y_field, true, view.id, out);
          } else {
            if (std::get<Network>(data).nodes.empty()) {
              out.push_back({Severity::error, view.id, "network has no nodes"});
            }
          }
        },
        view.params);
  }
  return out;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  for (const auto& d : diagnostics) {
    if (d.severity == Severity::error) return true;
  }
  return false;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading file '" + path + "'");
  return ss.str();
}

Dataset load_dataset(const DatasetRef& ref, const std::string& base_dir, const std::string& override_path,
                     std::vector<std::string>* warnings) {
  namespace fs = std::filesystem;
  auto resolve = [&](const std::string& p) {
    fs::path path(p);
    if (path.is_relative() && !base_dir.empty()) path = fs::path(base_dir) / path;
    return path.string();
  };
  std::string text;
  if (!override_path.empty()) {
    text = read_file(override_path);
  } else if (ref.inline_data) {
    text = ref.inline_data->is_string() ? ref.inline_data->get<std::string>() : ref.inline_data->dump();
  } else if (!ref.path.empty()) {
    text = read_file(resolve(ref.path));
  } else {
    throw ValidationError("spec names no dataset: set dataset.path, dataset.inline, or pass --data");
  }
  switch (ref.kind) {
    case DatasetKind::geo: {
      GeoLoadOptions opts;
      opts.value_fields = ref.value_fields;
      opts.category_fields = ref.category_fields;
      opts.id_property = ref.id_property;
      if (!ref.hex_sidecar.empty()) opts.hex_sidecar = read_file(resolve(ref.hex_sidecar));
      return load_geo(text, opts, warnings);
    }
    case DatasetKind::network:
      return load_network(text, warnings);
    case DatasetKind::table:
      return load_table(text);
  }
  throw ValidationError("unknown dataset kind");
}

}  // namespace viewstack
