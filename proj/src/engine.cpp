#include "viewstack/engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "viewstack/errors.hpp"
#include "viewstack/json_format.hpp"
#include "viewstack/layout.hpp"
#include "viewstack/projection.hpp"

namespace viewstack {

using nlohmann::json;

namespace {

bool in_subset(const ConstraintSpec& c, ConstraintSubset subset) {
  switch (subset) {
    case ConstraintSubset::all: return true;
    case ConstraintSubset::size_monotone: return c.monotone_in_size();
    case ConstraintSubset::aspect: return !c.monotone_in_size();
  }
  return true;
}

json viewport_json(const ViewSpec& spec, const Viewport& v) {
  return {{"view", spec.id}, {"type", to_string(spec.type())}, {"width", v.width()}, {"height", v.height()}};
}

std::vector<std::string> geo_text(const GeoFeatureCollection& geo, const std::string& field) {
  std::vector<std::string> out(geo.features.size());
  if (field.empty()) return out;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = geo.text(i, field);
  return out;
}

std::vector<double> geo_numbers(const GeoFeatureCollection& geo, const std::string& field) {
  std::vector<double> out(geo.features.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = geo.number(i, field);
  return out;
}

std::vector<std::string> feature_ids(const GeoFeatureCollection& geo) {
  std::vector<std::string> out;
  for (const auto& f : geo.features) out.push_back(f.id);
  return out;
}

class CircleMapModel : public ViewModel {
 public:
  CircleMapModel(const ViewSpec& spec, const GeoFeatureCollection& geo, const CircleMapParams& p,
                 std::vector<std::string>* warnings)
      : ViewModel(spec),
        params_(p),
        pg_(project(geo, p.projection, warnings)),
        ids_(feature_ids(geo)),
        values_(geo_numbers(geo, p.value_field)),
        categories_(geo_text(geo, p.category_field)) {}

  std::optional<ContentBox> content_box() const override { return pg_.box(); }

  json layout_json(const Viewport& v) const override {
    const CircleLayout cl = layout(v);
    json out = viewport_json(spec(), v);
    json circles = json::array();
    double dmin = HUGE_VAL, dmax = 0.0;
    for (const auto& c : cl.circles) {
      const Point p = position(c, cl.map_scale, v);
      circles.push_back({{"id", ids_[c.item]}, {"x", p.x}, {"y", p.y}, {"r", c.r}, {"category", categories_[c.item]}});
      dmin = std::min(dmin, 2.0 * c.r);
      dmax = std::max(dmax, 2.0 * c.r);
    }
    out["circles"] = std::move(circles);
    out["metrics"] = {{"map_scale", cl.map_scale}, {"min_diameter", dmin}, {"max_diameter", dmax}};
    extra_metrics(out["metrics"], cl.map_scale);
    return out;
  }

 protected:
  CircleLayout layout(const Viewport& v) const {
    return circle_map_layout(pg_, values_, v, params_.scale_factor, params_.margin);
  }

  virtual Point position(const Circle& c, double, const Viewport&) const { return {c.x, c.y}; }
  virtual void extra_metrics(json&, double) const {}

  std::vector<ConstraintResult> evaluate_sized(const std::vector<const ConstraintSpec*>& cs, const Viewport& v,
                                               EvalMode) const override {
    std::vector<ConstraintResult> out;
    if (cs.empty()) return out;
    const CircleLayout cl = layout(v);
    for (const auto* c : cs) {
      if (c->kind != ConstraintKind::min_circle_radius) unsupported(*c);
      out.push_back(eval_min_circle_radius(cl, c->threshold, c->allowed_failure_fraction));
    }
    return out;
  }

  CircleMapParams params_;
  ProjectedGeo pg_;
  std::vector<std::string> ids_;
  std::vector<double> values_;
  std::vector<std::string> categories_;
};

CircleMapParams as_circle_params(const DorlingParams& d) {
  return {d.value_field, d.category_field, d.projection, d.scale_factor, d.margin};
}

class DorlingModel : public CircleMapModel {
 public:
  DorlingModel(const ViewSpec& spec, const GeoFeatureCollection& geo, const DorlingParams& p,
               std::vector<std::string>* warnings)
      : CircleMapModel(spec, geo, as_circle_params(p), warnings), epsilon_(p.epsilon) {
    std::vector<double> radii;
    for (double value : values_) radii.push_back(p.scale_factor * std::sqrt(std::max(0.0, value)));
    relaxed_ = dorling_relax(pg_.centroids, radii, p.seed, p.max_iterations);
    if (relaxed_.iterations > p.max_iterations && warnings) {
      warnings->push_back(spec.id + ": circles still overlapped after " + std::to_string(p.max_iterations) +
                          " iterations; ran a repulsion-only cleanup");
    }
  }

 protected:
  Point position(const Circle& c, double, const Viewport& v) const override {
    return screen_mapper(pg_, v, params_.margin)(relaxed_.centers[c.item]);
  }

  void extra_metrics(json& metrics, double scale) const override {
    const double residual = relaxed_.residual_overlap * scale;
    metrics["residual_overlap"] = residual;
    metrics["converged"] = residual <= epsilon_;
  }

 private:
  double epsilon_;
  DorlingResult relaxed_;
};

class ChoroplethModel : public ViewModel {
 public:
  ChoroplethModel(const ViewSpec& spec, const GeoFeatureCollection& geo, const ChoroplethParams& p,
                  std::vector<std::string>* warnings)
      : ViewModel(spec),
        params_(p),
        pg_(project(geo, p.projection, warnings)),
        ids_(feature_ids(geo)),
        categories_(geo_text(geo, p.category_field)) {}

  std::optional<ContentBox> content_box() const override { return pg_.box(); }

  json layout_json(const Viewport& v) const override {
    const ScreenMapper map = screen_mapper(pg_, v, params_.margin);
    const auto areas = choropleth_areas(pg_, v, params_.margin);
    json out = viewport_json(spec(), v);
    json features = json::array();
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      json rings = json::array();
      for (const auto& ring : pg_.rings[i]) {
        json pts = json::array();
        for (const auto& p : ring) {
          const Point s = map(p);
          pts.push_back({s.x, s.y});
        }
        rings.push_back(std::move(pts));
      }
      features.push_back({{"id", ids_[i]}, {"category", categories_[i]}, {"area", areas[i]}, {"rings", rings}});
    }
    out["features"] = std::move(features);
    const double smallest = areas.empty() ? 0.0 : *std::min_element(areas.begin(), areas.end());
    out["metrics"] = {{"map_scale", map.fit.scale}, {"min_area", smallest}, {"min_width", std::sqrt(smallest)}};
    return out;
  }

 protected:
  std::vector<ConstraintResult> evaluate_sized(const std::vector<const ConstraintSpec*>& cs, const Viewport& v,
                                               EvalMode) const override {
    std::vector<ConstraintResult> out;
    if (cs.empty()) return out;
    const auto areas = choropleth_areas(pg_, v, params_.margin);
    for (const auto* c : cs) {
      if (c->kind != ConstraintKind::min_area_size) unsupported(*c);
      out.push_back(eval_min_area_size(areas, c->threshold));
    }
    return out;
  }

 private:
  ChoroplethParams params_;
  ProjectedGeo pg_;
  std::vector<std::string> ids_;
  std::vector<std::string> categories_;
};

class HexMapModel : public ViewModel {
 public:
  HexMapModel(const ViewSpec& spec, const GeoFeatureCollection& geo, const HexMapParams& p)
      : ViewModel(spec), params_(p), ids_(feature_ids(geo)), categories_(geo_text(geo, p.category_field)) {
    for (const auto& f : geo.features) {
      if (!f.hex) throw LayoutError(spec.id, "feature '" + f.id + "' has no hex position");
      coords_.push_back(*f.hex);
    }
  }

  std::optional<ContentBox> content_box() const override { return hexgrid_extent(coords_); }

  json layout_json(const Viewport& v) const override {
    const HexLayout g = hexgrid_layout(coords_, v, params_.margin);
    json out = viewport_json(spec(), v);
    json hexes = json::array();
    for (const auto& c : g.cells) {
      hexes.push_back({{"id", ids_[c.item]}, {"x", c.x}, {"y", c.y}, {"category", categories_[c.item]}});
    }
    out["hexes"] = std::move(hexes);
    out["metrics"] = {{"hex_width", g.width}, {"hex_area", hex_area(g.width)}};
    return out;
  }

 protected:
  std::vector<ConstraintResult> evaluate_sized(const std::vector<const ConstraintSpec*>& cs, const Viewport& v,
                                               EvalMode) const override {
    std::vector<ConstraintResult> out;
    if (cs.empty()) return out;
    const HexLayout g = hexgrid_layout(coords_, v, params_.margin);
    for (const auto* c : cs) {
      if (c->kind != ConstraintKind::min_hex_size) unsupported(*c);
      out.push_back(eval_min_hex_size(g, c->threshold));
    }
    return out;
  }

 private:
  HexMapParams params_;
  std::vector<std::string> ids_;
  std::vector<std::string> categories_;
  std::vector<HexCoord> coords_;
};

class WaffleModel : public ViewModel {
 public:
  WaffleModel(const ViewSpec& spec, const GeoFeatureCollection& geo, const WaffleParams& p)
      : ViewModel(spec),
        params_(p),
        ids_(feature_ids(geo)),
        group_of_(geo_text(geo, p.group_field)),
        categories_(geo_text(geo, p.category_field)) {
    // Declared groups first, then any others alphabetically.
    std::vector<std::string> order = p.group_order;
    std::vector<std::string> rest;
    for (const auto& g : group_of_) {
      if (std::find(order.begin(), order.end(), g) == order.end() &&
          std::find(rest.begin(), rest.end(), g) == rest.end()) {
        rest.push_back(g);
      }
    }
    std::sort(rest.begin(), rest.end());
    order.insert(order.end(), rest.begin(), rest.end());
    for (const auto& name : order) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < group_of_.size(); ++i) {
        if (group_of_[i] == name) members.push_back(i);
      }
      std::stable_sort(members.begin(), members.end(),
                       [&](std::size_t a, std::size_t b) { return categories_[a] < categories_[b]; });
      groups_.push_back(std::move(members));
    }
  }

  json layout_json(const Viewport& v) const override {
    const WaffleLayout g = layout(v);
    json out = viewport_json(spec(), v);
    json squares = json::array();
    for (const auto& s : g.squares) {
      squares.push_back({{"id", ids_[s.item]}, {"x", s.x}, {"y", s.y}, {"group", group_of_[s.item]},
                         {"category", categories_[s.item]}});
    }
    out["orientation"] = to_string(params_.orientation);
    out["squares"] = std::move(squares);
    out["metrics"] = {{"side", g.side}, {"block_span", g.block_span}};
    return out;
  }

 protected:
  WaffleLayout layout(const Viewport& v) const {
    return waffle_layout(groups_, v, params_.orientation, params_.group_gap, params_.margin);
  }

  std::vector<ConstraintResult> evaluate_sized(const std::vector<const ConstraintSpec*>& cs, const Viewport& v,
                                               EvalMode) const override {
    std::vector<ConstraintResult> out;
    if (cs.empty()) return out;
    const WaffleLayout g = layout(v);
    for (const auto* c : cs) {
      if (c->kind != ConstraintKind::min_square_size) unsupported(*c);
      out.push_back(eval_min_square_size(g, c->threshold));
    }
    return out;
  }

 private:
  WaffleParams params_;
  std::vector<std::string> ids_;
  std::vector<std::string> group_of_;
  std::vector<std::string> categories_;
  std::vector<std::vector<std::size_t>> groups_;
};

class BarModel : public ViewModel {
 public:
  BarModel(const ViewSpec& spec, const Dataset& data, const BarParams& p) : ViewModel(spec), params_(p) {
    if (const auto* geo = std::get_if<GeoFeatureCollection>(&data)) {
      values_ = geo_numbers(*geo, p.value_field);
      labels_ = p.label_field == "id" ? feature_ids(*geo) : geo_text(*geo, p.label_field);
      categories_ = geo_text(*geo, p.category_field);
    } else {
      const auto& t = std::get<Table>(data);
      const auto nums = t.numeric(p.value_field);
      const auto labels = t.text(p.label_field);
      const auto cats = p.category_field.empty() ? std::vector<std::string>(t.row_count()) : t.text(p.category_field);
      for (std::size_t i = 0; i < nums.size(); ++i) {
        if (!nums[i]) continue;
        values_.push_back(*nums[i]);
        labels_.push_back(labels[i]);
        categories_.push_back(cats[i]);
      }
    }
  }

  json layout_json(const Viewport& v) const override {
    const BarLayout m = layout(v);
    json out = viewport_json(spec(), v);
    json bars = json::array();
    for (const auto& b : m.bars) {
      bars.push_back({{"label", labels_[b.item]}, {"value", values_[b.item]}, {"length", b.length}, {"x", b.x},
                      {"y", b.y}, {"w", b.w}, {"h", b.h}, {"category", categories_[b.item]}});
    }
    out["orientation"] = to_string(params_.orientation);
    out["bars"] = std::move(bars);
    out["metrics"] = {{"shown", m.shown}, {"total", values_.size()}, {"pitch", m.pitch}};
    return out;
  }

 protected:
  BarLayout layout(const Viewport& v) const {
    return bar_layout(values_, v, params_.orientation, params_.min_pitch, params_.margin);
  }

  std::vector<ConstraintResult> evaluate_sized(const std::vector<const ConstraintSpec*>& cs, const Viewport& v,
                                               EvalMode) const override {
    std::vector<ConstraintResult> out;
    if (cs.empty()) return out;
    const BarLayout m = layout(v);
    for (const auto* c : cs) {
      if (c->kind != ConstraintKind::min_bar_count) unsupported(*c);
      out.push_back(eval_min_bar_count(m, c->threshold));
    }
    return out;
  }

 private:
  BarParams params_;
  std::vector<double> values_;
  std::vector<std::string> labels_;
  std::vector<std::string> categories_;
};

class ScatterModel : public ViewModel {
 public:
  ScatterModel(const ViewSpec& spec, const Table& t, const ScatterParams& p)
      : ViewModel(spec),
        params_(p),
        xs_(t.numeric(p.x_field)),
        ys_(t.numeric(p.y_field)),
        categories_(p.category_field.empty() ? std::vector<std::string>(t.row_count()) : t.text(p.category_field)) {}

  json layout_json(const Viewport& v) const override {
    const ScatterLayout s = layout(v);
    json out = viewport_json(spec(), v);
    json marks = json::array();
    for (const auto& m : s.marks) {
      marks.push_back({{"row", m.item}, {"x", m.x}, {"y", m.y}, {"r", m.r}, {"category", categories_[m.item]}});
    }
    out["marks"] = std::move(marks);
    out["plot"] = {{"x0", s.area.x0}, {"y0", s.area.y0}, {"width", s.area.width}, {"height", s.area.height}};
    out["metrics"] = {{"dropped", s.dropped}, {"overplotting", overplotting(s.marks)}};
    return out;
  }

 protected:
  ScatterLayout layout(const Viewport& v) const {
    return scatter_layout(xs_, ys_, v, params_.mark_radius, params_.margin);
  }

  std::vector<ConstraintResult> evaluate_sized(const std::vector<const ConstraintSpec*>& cs, const Viewport& v,
                                               EvalMode mode) const override {
    std::vector<ConstraintResult> out;
    if (cs.empty()) return out;
    const ScatterLayout s = layout(v);
    std::optional<double> full;
    for (const auto* c : cs) {
      if (c->kind != ConstraintKind::max_overplotting) unsupported(*c);
      if (mode == EvalMode::decide) {
        out.push_back(eval_max_overplotting(overplotting_bounded(s.marks, c->threshold).value, c->threshold));
      } else {
        if (!full) full = overplotting(s.marks);
        out.push_back(eval_max_overplotting(*full, c->threshold));
      }
    }
    return out;
  }

 private:
  ScatterParams params_;
  std::vector<std::optional<double>> xs_;
  std::vector<std::optional<double>> ys_;
  std::vector<std::string> categories_;
};

class HeatmapModel : public ViewModel {
 public:
  HeatmapModel(const ViewSpec& spec, const Table& t, const HeatmapParams& p)
      : ViewModel(spec), params_(p), xs_(t.numeric(p.x_field)), ys_(t.numeric(p.y_field)) {}

  json layout_json(const Viewport& v) const override {
    const HeatmapLayout h = heatmap_layout(xs_, ys_, v, params_.bins_x, params_.bins_y, params_.margin);
    json out = viewport_json(spec(), v);
    json cells = json::array();
    for (int r = 0; r < h.bins_y; ++r) {
      for (int c = 0; c < h.bins_x; ++c) {
        const double y = h.area.y0 + h.area.height - (r + 1) * h.cell_height;
        cells.push_back({{"col", c}, {"row", r}, {"x", h.area.x0 + c * h.cell_width}, {"y", y},
                         {"w", h.cell_width}, {"h", h.cell_height},
                         {"count", h.counts[static_cast<std::size_t>(r) * h.bins_x + c]}});
      }
    }
    out["cells"] = std::move(cells);
    out["metrics"] = {{"cell_width", h.cell_width}, {"cell_height", h.cell_height}, {"dropped", h.dropped}};
    return out;
  }

 protected:
  std::vector<ConstraintResult> evaluate_sized(const std::vector<const ConstraintSpec*>& cs, const Viewport&,
                                               EvalMode) const override {
    if (!cs.empty()) unsupported(*cs.front());
    return {};
  }

 private:
  HeatmapParams params_;
  std::vector<std::optional<double>> xs_;
  std::vector<std::optional<double>> ys_;
};

json network_nodes(const Network& n) {
  json nodes = json::array();
  for (const auto& node : n.nodes) nodes.push_back({{"id", node.id}, {"label", node.label}});
  return nodes;
}

json network_links(const Network& n) {
  json links = json::array();
  for (const auto& l : n.links) links.push_back({{"source", l.source}, {"target", l.target}, {"weight", l.weight}});
  return links;
}

class MatrixModel : public ViewModel {
 public:
  MatrixModel(const ViewSpec& spec, const Network& n, const MatrixParams& p)
      : ViewModel(spec), params_(p), network_(n) {}

  std::optional<ContentBox> content_box() const override { return ContentBox(1.0, 1.0); }

  json layout_json(const Viewport& v) const override {
    const MatrixLayout m = matrix_layout(network_.nodes.size(), v, params_.label_gutter);
    json out = viewport_json(spec(), v);
    out["nodes"] = network_nodes(network_);
    json cells = json::array();
    for (const auto& l : network_.links) {
      cells.push_back({{"row", l.source}, {"col", l.target}, {"weight", l.weight}});
      cells.push_back({{"row", l.target}, {"col", l.source}, {"weight", l.weight}});
    }
    out["cells"] = std::move(cells);
    out["metrics"] = {{"cell", m.cell}, {"x0", m.x0}, {"y0", m.y0}, {"label_size", m.cell}};
    return out;
  }

 protected:
  std::vector<ConstraintResult> evaluate_sized(const std::vector<const ConstraintSpec*>& cs, const Viewport& v,
                                               EvalMode) const override {
    std::vector<ConstraintResult> out;
    if (cs.empty()) return out;
    const MatrixLayout m = matrix_layout(network_.nodes.size(), v, params_.label_gutter);
    for (const auto* c : cs) {
      if (c->kind != ConstraintKind::min_matrix_label_size) unsupported(*c);
      out.push_back(eval_min_label_size(c->kind, m.cell, c->threshold));
    }
    return out;
  }

 private:
  MatrixParams params_;
  Network network_;
};

class ArcModel : public ViewModel {
 public:
  ArcModel(const ViewSpec& spec, const Network& n, const ArcParams& p) : ViewModel(spec), params_(p), network_(n) {}

  json layout_json(const Viewport& v) const override {
    const ArcLayout a = arc_layout(network_.nodes.size(), v, params_.label_gutter);
    json out = viewport_json(spec(), v);
    json nodes = json::array();
    for (std::size_t i = 0; i < network_.nodes.size(); ++i) {
      nodes.push_back({{"id", network_.nodes[i].id}, {"label", network_.nodes[i].label}, {"x", a.xs[i]},
                       {"y", a.baseline}});
    }
    json arcs = json::array();
    for (const auto& l : network_.links) {
      const double x0 = a.xs[l.source], x1 = a.xs[l.target];
      arcs.push_back({{"source", l.source}, {"target", l.target}, {"weight", l.weight}, {"cx", (x0 + x1) / 2.0},
                      {"r", std::abs(x1 - x0) / 2.0}});
    }
    out["nodes"] = std::move(nodes);
    out["arcs"] = std::move(arcs);
    out["metrics"] = {{"pitch", a.pitch}, {"baseline", a.baseline}, {"label_size", a.pitch}};
    return out;
  }

 protected:
  std::vector<ConstraintResult> evaluate_sized(const std::vector<const ConstraintSpec*>& cs, const Viewport& v,
                                               EvalMode) const override {
    std::vector<ConstraintResult> out;
    if (cs.empty()) return out;
    const ArcLayout a = arc_layout(network_.nodes.size(), v, params_.label_gutter);
    for (const auto* c : cs) {
      if (c->kind != ConstraintKind::min_arc_label_size) unsupported(*c);
      out.push_back(eval_min_label_size(c->kind, a.pitch, c->threshold));
    }
    return out;
  }

 private:
  ArcParams params_;
  Network network_;
};

class NodeLinkModel : public ViewModel {
 public:
  NodeLinkModel(const ViewSpec& spec, const Network& n, const NodeLinkParams& p)
      : ViewModel(spec), params_(p), network_(n), unit_(force_layout(n, p.seed, p.iterations)) {}

  json layout_json(const Viewport& v) const override {
    const auto pos = fit_unit_positions(unit_, v, params_.margin, params_.node_radius);
    json out = viewport_json(spec(), v);
    json nodes = json::array();
    for (std::size_t i = 0; i < pos.size(); ++i) {
      nodes.push_back({{"id", network_.nodes[i].id}, {"label", network_.nodes[i].label}, {"x", pos[i].x},
                       {"y", pos[i].y}, {"r", params_.node_radius}});
    }
    out["nodes"] = std::move(nodes);
    out["links"] = network_links(network_);
    return out;
  }

 protected:
  std::vector<ConstraintResult> evaluate_sized(const std::vector<const ConstraintSpec*>& cs, const Viewport&,
                                               EvalMode) const override {
    if (!cs.empty()) unsupported(*cs.front());
    return {};
  }

 private:
  NodeLinkParams params_;
  Network network_;
  std::vector<Point> unit_;
};

template <typename T>
const T& dataset_as(const Dataset& data, const ViewSpec& spec) {
  if (const auto* d = std::get_if<T>(&data)) return *d;
  throw LayoutError(spec.id, std::string(to_string(spec.type())) + " cannot use a " +
                                 std::string(to_string(kind_of(data))) + " dataset");
}

}  // namespace

json to_json(const Selection& s) {
  json results = json::array();
  for (const auto& e : s.evaluations) {
    for (const auto& r : e.results) {
      results.push_back({{"view", e.view_id},
                         {"constraint", to_string(r.kind)},
                         {"measured", r.measured},
                         {"threshold", r.threshold},
                         {"margin", r.margin},
                         {"passed", r.passed}});
    }
  }
  json evaluated = json::array();
  for (const auto& e : s.evaluations) evaluated.push_back({{"view", e.view_id}, {"passed", e.passed}});
  return {{"view", s.view_id}, {"index", s.view_index}, {"fallback", s.fallback}, {"results", results},
          {"evaluated", evaluated}};
}

bool ViewModel::has_constraints(ConstraintSubset subset) const {
  return std::any_of(spec_.constraints.begin(), spec_.constraints.end(),
                     [&](const ConstraintSpec& c) { return in_subset(c, subset); });
}

void ViewModel::unsupported(const ConstraintSpec& c) const {
  throw LayoutError(spec_.id, "constraint " + std::string(to_string(c.kind)) + " does not apply to " +
                                  std::string(to_string(spec_.type())));
}

ViewEvaluation ViewModel::evaluate(const Viewport& v, ConstraintSubset subset, EvalMode mode) const {
  ViewEvaluation out{spec_.id, {}, true};
  std::vector<const ConstraintSpec*> sized;
  std::vector<std::size_t> slots;
  std::vector<std::optional<ConstraintResult>> ordered(spec_.constraints.size());
  // Aspect checks are O(1), so they go first and can short-circuit.
  for (std::size_t i = 0; i < spec_.constraints.size(); ++i) {
    const auto& c = spec_.constraints[i];
    if (!in_subset(c, subset)) continue;
    if (c.monotone_in_size()) {
      sized.push_back(&c);
      slots.push_back(i);
      continue;
    }
    const auto box = c.kind == ConstraintKind::max_aspect_ratio_diff ? content_box() : std::nullopt;
    if (c.kind == ConstraintKind::max_aspect_ratio_diff && !box) unsupported(c);
    ordered[i] = eval_aspect(c.kind, v, box, c.threshold);
    if (!ordered[i]->passed && mode == EvalMode::decide) {
      out.passed = false;
      out.results.push_back(*ordered[i]);
      return out;
    }
  }
  const auto sized_results = evaluate_sized(sized, v, mode);
  for (std::size_t k = 0; k < sized_results.size(); ++k) ordered[slots[k]] = sized_results[k];
  for (auto& r : ordered) {
    if (!r) continue;
    out.passed = out.passed && r->passed;
    out.results.push_back(*r);
  }
  return out;
}

std::unique_ptr<ViewModel> make_view_model(const ViewSpec& spec, const Dataset& data,
                                           std::vector<std::string>* warnings) {
  return std::visit(
      [&](const auto& p) -> std::unique_ptr<ViewModel> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, CircleMapParams>) {
          return std::make_unique<CircleMapModel>(spec, dataset_as<GeoFeatureCollection>(data, spec), p, warnings);
        } else if constexpr (std::is_same_v<T, DorlingParams>) {
          return std::make_unique<DorlingModel>(spec, dataset_as<GeoFeatureCollection>(data, spec), p, warnings);
        } else if constexpr (std::is_same_v<T, ChoroplethParams>) {
          return std::make_unique<ChoroplethModel>(spec, dataset_as<GeoFeatureCollection>(data, spec), p, warnings);
        } else if constexpr (std::is_same_v<T, HexMapParams>) {
          return std::make_unique<HexMapModel>(spec, dataset_as<GeoFeatureCollection>(data, spec), p);
        } else if constexpr (std::is_same_v<T, WaffleParams>) {
          return std::make_unique<WaffleModel>(spec, dataset_as<GeoFeatureCollection>(data, spec), p);
        } else if constexpr (std::is_same_v<T, BarParams>) {
          return std::make_unique<BarModel>(spec, data, p);
        } else if constexpr (std::is_same_v<T, ScatterParams>) {
          return std::make_unique<ScatterModel>(spec, dataset_as<Table>(data, spec), p);
        } else if constexpr (std::is_same_v<T, HeatmapParams>) {
          return std::make_unique<HeatmapModel>(spec, dataset_as<Table>(data, spec), p);
        } else if constexpr (std::is_same_v<T, MatrixParams>) {
          return std::make_unique<MatrixModel>(spec, dataset_as<Network>(data, spec), p);
        } else if constexpr (std::is_same_v<T, ArcParams>) {
          return std::make_unique<ArcModel>(spec, dataset_as<Network>(data, spec), p);
        } else {
          return std::make_unique<NodeLinkModel>(spec, dataset_as<Network>(data, spec), p);
        }
      },
      spec.params);
}

Provenance provenance_of(const ResponsiveSpec& spec, const Dataset& data) {
  return {hex64(fnv1a64(canonical_dump(to_json(spec)))), hex64(fnv1a64(canonical_dump(dataset_to_json(data))))};
}

Engine::Engine(ResponsiveSpec spec, std::shared_ptr<const Dataset> data)
    : spec_(std::move(spec)), data_(std::move(data)) {
  if (!data_) throw std::invalid_argument("Engine: no dataset");
  const auto diagnostics = validate_spec(spec_, *data_);
  if (has_errors(diagnostics)) {
    std::string msg = "spec does not fit the dataset:";
    std::vector<std::string> offenders;
    for (const auto& d : diagnostics) {
      if (d.severity != Severity::error) continue;
      msg += "\n  " + d.view_id + ": " + d.message;
      offenders.push_back(d.view_id);
    }
    throw ValidationError(msg, offenders);
  }
  for (const auto& d : diagnostics) warnings_.push_back(d.view_id + ": " + d.message);
  for (const auto& v : spec_.views) {
    try {
      views_.push_back(make_view_model(v, *data_, &warnings_));
    } catch (const LayoutError&) {
      throw;
    } catch (const ValidationError&) {
      throw;
    } catch (const std::exception& e) {
      throw LayoutError(v.id, e.what());
    }
  }
  provenance_ = provenance_of(spec_, *data_);
}

std::optional<std::size_t> Engine::view_index(std::string_view id) const {
  for (std::size_t i = 0; i < views_.size(); ++i) {
    if (views_[i]->id() == id) return i;
  }
  return std::nullopt;
}

ViewEvaluation Engine::guarded_evaluate(std::size_t i, const Viewport& v, ConstraintSubset subset,
                                        EvalMode mode) const {
  try {
    return views_[i]->evaluate(v, subset, mode);
  } catch (const LayoutError&) {
    throw;
  } catch (const std::exception& e) {
    throw LayoutError(views_[i]->id(), e.what());
  }
}

Selection Engine::select(const Viewport& v, bool evaluate_all) const {
  Selection out;
  bool found = false;
  for (std::size_t i = 0; i < views_.size(); ++i) {
    out.evaluations.push_back(guarded_evaluate(i, v, ConstraintSubset::all, EvalMode::report));
    if (!found && out.evaluations.back().passed) {
      found = true;
      out.view_index = i;
      if (!evaluate_all) break;
    }
  }
  if (!found) {
    out.view_index = views_.size() - 1;
    out.fallback = true;
  }
  out.view_id = views_[out.view_index]->id();
  return out;
}

std::size_t Engine::select_index(const Viewport& v) const {
  for (std::size_t i = 0; i < views_.size(); ++i) {
    if (guarded_evaluate(i, v, ConstraintSubset::all, EvalMode::decide).passed) return i;
  }
  return views_.size();
}

bool Engine::view_passes(std::size_t i, const Viewport& v, ConstraintSubset subset) const {
  return guarded_evaluate(i, v, subset, EvalMode::decide).passed;
}

json Engine::layout(std::string_view view_id, const Viewport& v) const {
  const auto i = view_index(view_id);
  if (!i) throw std::out_of_range("unknown view '" + std::string(view_id) + "'");
  try {
    return views_[*i]->layout_json(v);
  } catch (const LayoutError&) {
    throw;
  } catch (const std::exception& e) {
    throw LayoutError(views_[*i]->id(), e.what());
  }
}

Selection select_view(const ResponsiveSpec& spec, const Dataset& data, const Viewport& v) {
  const Engine engine(spec, std::shared_ptr<const Dataset>(&data, [](const Dataset*) {}));
  return engine.select(v);
}

}  // namespace viewstack
