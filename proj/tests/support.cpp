#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include "viewstack/errors.hpp"
#include "viewstack/layout.hpp"
#include "viewstack/projection.hpp"

namespace vstest {

namespace fs = std::filesystem;

std::string data_path(const std::string& relative) { return (fs::path(VIEWSTACK_DATA_DIR) / relative).string(); }

std::string spec_path(const std::string& name) { return data_path("specs/" + name + ".json"); }

ResponsiveSpec load_spec(const std::string& name) { return parse_spec(read_file(spec_path(name))); }

Engine load_engine(const std::string& name, const std::string& data_override) {
  ResponsiveSpec spec = load_spec(name);
  auto data = std::make_shared<const Dataset>(load_dataset(spec.dataset, data_path("specs"), data_override));
  return Engine(std::move(spec), std::move(data));
}

Engine load_engine(ResponsiveSpec spec, const std::string& base_dir) {
  auto data = std::make_shared<const Dataset>(load_dataset(spec.dataset, base_dir));
  return Engine(std::move(spec), std::move(data));
}

double brute_overplotting(const std::vector<Circle>& marks) {
  const std::size_t n = marks.size();
  if (n < 2) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      sum += disk_overlap(marks[i].r, marks[j].r, std::hypot(marks[j].x - marks[i].x, marks[j].y - marks[i].y));
    }
  }
  return sum / (static_cast<double>(n) * (n - 1) / 2.0);
}

double integrated_overlap(double r1, double r2, double d, int samples) {
  // Disk 1 at the origin, disk 2 at (d, 0). Both chords at x are centred on
  // y = 0, so their intersection is twice the shorter half-chord.
  const double lo = std::max(-r1, d - r2);
  const double hi = std::min(r1, d + r2);
  if (hi <= lo) return 0.0;
  const double h = (hi - lo) / samples;
  double area = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double x = lo + (k + 0.5) * h;
    const double a = std::sqrt(std::max(0.0, r1 * r1 - x * x));
    const double b = std::sqrt(std::max(0.0, r2 * r2 - (x - d) * (x - d)));
    area += 2.0 * std::min(a, b) * h;
  }
  const double small = std::min(r1, r2);
  return area / (M_PI * small * small);
}

std::vector<Circle> random_marks(std::mt19937& rng, std::size_t n, int mode) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Circle> out;
  out.reserve(n);
  const double extent = 20.0 + 400.0 * u(rng);
  const bool same_radius = u(rng) < 0.5;
  const double base_r = 0.5 + 8.0 * u(rng);
  for (std::size_t i = 0; i < n; ++i) {
    double x = extent * u(rng), y = extent * u(rng);
    if (mode == 1) {
      // A few tight clusters.
      const double cx = extent * std::floor(u(rng) * 4.0) / 4.0;
      x = cx + 3.0 * u(rng);
      y = cx + 3.0 * u(rng);
    } else if (mode == 2) {
      // Quantised positions, many exact duplicates (like rounded ratings).
      x = std::round(x / 10.0) * 10.0;
      y = std::round(y / 10.0) * 10.0;
    }
    double r = same_radius ? base_r : base_r * (0.1 + 2.0 * u(rng));
    if (u(rng) < 0.02) r = 0.0;
    out.push_back({i, x, y, r});
  }
  return out;
}

OracleChoice oracle_select(const Engine& engine, const Viewport& v) {
  for (std::size_t i = 0; i < engine.view_count(); ++i) {
    if (engine.view(i).evaluate(v, ConstraintSubset::all, EvalMode::report).passed) return {i, false};
  }
  return {engine.view_count() - 1, true};
}

double brute_waffle_side(const std::vector<std::size_t>& group_sizes, double across, double along, int gap) {
  std::size_t total = 0;
  for (auto g : group_sizes) total += g;
  std::vector<double> candidates;
  for (std::size_t c = 1; c <= total + 1; ++c) candidates.push_back(across / c);
  for (std::size_t k = 1; k <= total + group_sizes.size() * (gap + 1) + 1; ++k) candidates.push_back(along / k);
  double best = 0.0;
  for (double s : candidates) {
    if (!(s > best)) continue;
    const auto fit_across = static_cast<std::size_t>(std::floor(across / s + 1e-9));
    const auto fit_along = static_cast<std::size_t>(std::floor(along / s + 1e-9));
    if (fit_across == 0) continue;
    std::size_t rows = 0, blocks = 0;
    for (auto g : group_sizes) {
      if (g == 0) continue;
      rows += (g + fit_across - 1) / fit_across;
      ++blocks;
    }
    rows += (blocks - 1) * static_cast<std::size_t>(gap);
    if (rows <= fit_along) best = s;
  }
  return best;
}

GeoFeatureCollection synthetic_geo(std::mt19937& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GeoFeatureCollection geo;
  geo.value_fields = {"value"};
  geo.category_fields = {"cat", "group"};
  for (std::size_t i = 0; i < n; ++i) {
    const double lon = -150.0 + 300.0 * u(rng);
    const double lat = -60.0 + 120.0 * u(rng);
    const double s = 0.2 + 5.0 * u(rng);
    GeoFeature f;
    f.id = "F" + std::to_string(i);
    f.polygons.push_back({{{{lon, lat}, {lon + s, lat}, {lon + s, lat + s}, {lon, lat + s}, {lon, lat}}}});
    f.properties["value"] = std::round(std::exp(std::log(1e3) + u(rng) * std::log(1e5)));
    f.properties["cat"] = std::string(1, static_cast<char>('A' + i % 4));
    f.properties["group"] = "G" + std::to_string(i % 3);
    f.hex = HexCoord{static_cast<int>(i / 8), static_cast<int>(i % 8)};
    geo.features.push_back(std::move(f));
  }
  return geo;
}

namespace {

double rounded(double x, double unit) { return std::max(unit, std::round(x / unit) * unit); }

}  // namespace

ResponsiveSpec random_geo_spec(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  static const ViewType kTypes[] = {ViewType::circle_map, ViewType::dorling_cartogram, ViewType::choropleth,
                                    ViewType::hex_map,    ViewType::waffle_chart,      ViewType::bar_chart};
  ResponsiveSpec spec;
  spec.name = "random";
  spec.dataset.kind = DatasetKind::geo;
  spec.dataset.path = "synthetic.geojson";
  spec.dataset.value_fields = {"value"};
  spec.dataset.category_fields = {"cat", "group"};
  const int views = 1 + static_cast<int>(u(rng) * 5);
  ProjectionSpec equi;
  ProjectionSpec albers{ProjectionKind::albers_conic, 10.0, 0.0, 0.0, 20.0, 50.0};
  for (int k = 0; k < views; ++k) {
    const ViewType type = kTypes[static_cast<int>(u(rng) * 6)];
    ViewSpec v;
    v.id = "v" + std::to_string(k);
    const double scale = rounded(1e-4 + 9e-4 * u(rng), 1e-5);
    switch (type) {
      case ViewType::circle_map: v.params = CircleMapParams{"value", "cat", equi, scale, 0.0}; break;
      case ViewType::dorling_cartogram: {
        DorlingParams p;
        p.value_field = "value";
        p.projection = u(rng) < 0.5 ? equi : albers;
        p.scale_factor = scale;
        p.seed = static_cast<unsigned>(u(rng) * 100);
        v.params = p;
        break;
      }
      case ViewType::choropleth: v.params = ChoroplethParams{u(rng) < 0.5 ? equi : albers, "cat", 0.0}; break;
      case ViewType::hex_map: v.params = HexMapParams{"cat", 0.0}; break;
      case ViewType::waffle_chart: {
        WaffleParams p;
        p.group_field = "group";
        p.group_order = {"G2", "G0", "G1"};
        p.orientation = u(rng) < 0.5 ? Orientation::vertical : Orientation::horizontal;
        v.params = p;
        break;
      }
      default: {
        BarParams p;
        p.value_field = "value";
        p.label_field = "id";
        p.orientation = u(rng) < 0.5 ? Orientation::vertical : Orientation::horizontal;
        v.params = p;
        break;
      }
    }
    std::vector<ConstraintKind> kinds;
    for (auto kind : all_constraint_kinds()) {
      if (is_applicable(kind, type)) kinds.push_back(kind);
    }
    const int count = static_cast<int>(u(rng) * 3);
    for (int c = 0; c < count; ++c) {
      ConstraintSpec cs;
      cs.kind = kinds[static_cast<std::size_t>(u(rng) * kinds.size())];
      switch (cs.kind) {
        case ConstraintKind::min_circle_radius:
          cs.threshold = rounded(0.5 + 5.5 * u(rng), 0.01);
          cs.allowed_failure_fraction = rounded(0.3 * u(rng), 0.01);
          break;
        case ConstraintKind::min_area_size: cs.threshold = rounded(1.0 + 29.0 * u(rng), 0.01); break;
        case ConstraintKind::min_hex_size: cs.threshold = rounded(2.0 + 38.0 * u(rng), 0.01); break;
        case ConstraintKind::min_square_size: cs.threshold = rounded(1.0 + 29.0 * u(rng), 0.01); break;
        case ConstraintKind::max_aspect_ratio_diff: cs.threshold = rounded(0.1 + 0.9 * u(rng), 0.01); break;
        case ConstraintKind::min_aspect_ratio: cs.threshold = rounded(0.5 + 1.5 * u(rng), 0.01); break;
        case ConstraintKind::max_aspect_ratio: cs.threshold = rounded(0.5 + 2.0 * u(rng), 0.01); break;
        case ConstraintKind::min_bar_count: cs.threshold = std::round(1.0 + 24.0 * u(rng)); break;
        default: break;
      }
      v.constraints.push_back(cs);
    }
    spec.views.push_back(std::move(v));
  }
  return spec;
}

double spherical_rect_area(double lon0, double lat0, double lon1, double lat1) {
  const double rad = M_PI / 180.0;
  return (lon1 - lon0) * rad * (std::sin(lat1 * rad) - std::sin(lat0 * rad));
}

double min_passing_width(const Engine& engine, std::size_t i, double aspect, double lo, double hi, double tol) {
  auto passes = [&](double w) { return engine.view_passes(i, Viewport(w, w / aspect), ConstraintSubset::all); };
  if (!passes(hi)) return -1.0;
  if (passes(lo)) return lo;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (passes(mid) ? hi : lo) = mid;
  }
  return hi;
}

double label_share(const ViewLandscape& l, const std::vector<std::string>& labels) {
  std::size_t hits = 0;
  for (auto c : l.cells) {
    if (std::find(labels.begin(), labels.end(), l.labels[c]) != labels.end()) ++hits;
  }
  return l.cells.empty() ? 0.0 : static_cast<double>(hits) / l.cells.size();
}

bool monotone_upward(const ViewLandscape& l, const std::string& label) {
  // Column-wise: once a cell carries the label, every taller cell does too;
  // and the lowest such row never rises as the width grows.
  std::size_t prev_first = l.rows;
  for (std::size_t c = 0; c < l.cols; ++c) {
    std::size_t first = l.rows;
    for (std::size_t r = 0; r < l.rows; ++r) {
      if (l.label_at(c, r) == label) {
        if (first == l.rows) first = r;
      } else if (first != l.rows) {
        return false;
      }
    }
    if (first > prev_first) return false;
    prev_first = first;
  }
  return true;
}

// ---- property suites ----

namespace {

bool close_rel(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + 1e-12; }

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(10);
  s << x;
  return s.str();
}

const GeoFeatureCollection& geo_of(const Engine& e) { return std::get<GeoFeatureCollection>(e.data()); }

}  // namespace

Failures check_scale_laws(std::mt19937& rng, int trials) {
  Failures out;
  const Engine world = load_engine("population_world");
  const Engine uk = load_engine("uk_election");
  const auto& wspec = std::get<CircleMapParams>(world.spec().views[0].params);
  const ProjectedGeo wpg = project(geo_of(world), wspec.projection);
  std::vector<double> values;
  for (std::size_t i = 0; i < geo_of(world).features.size(); ++i) values.push_back(geo_of(world).number(i, "population"));
  const auto& cspec = std::get<ChoroplethParams>(uk.spec().views[0].params);
  const ProjectedGeo upg = project(geo_of(uk), cspec.projection);
  std::vector<HexCoord> hexes;
  for (const auto& f : geo_of(uk).features) hexes.push_back(*f.hex);
  const std::vector<std::vector<std::size_t>> groups{std::vector<std::size_t>(59), std::vector<std::size_t>(533),
                                                     std::vector<std::size_t>(18), std::vector<std::size_t>(40)};

  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < trials; ++t) {
    const Viewport v(50.0 + 1500.0 * u(rng), 50.0 + 900.0 * u(rng));
    const double s = 0.1 + 3.9 * u(rng);
    const Viewport vs(v.width() * s, v.height() * s);
    const std::string at = " at " + fmt(v.width()) + "x" + fmt(v.height()) + " s=" + fmt(s);

    const CircleLayout a = circle_map_layout(wpg, values, v, wspec.scale_factor);
    const CircleLayout b = circle_map_layout(wpg, values, vs, wspec.scale_factor);
    for (std::size_t i = 0; i < a.circles.size(); ++i) {
      if (!close_rel(b.circles[i].r, a.circles[i].r * s, 1e-9) || !close_rel(b.circles[i].x, a.circles[i].x * s, 1e-9) ||
          !close_rel(b.circles[i].y, a.circles[i].y * s, 1e-9)) {
        out.push_back("circle " + std::to_string(i) + " does not scale linearly" + at);
        break;
      }
    }
    const auto areas_a = choropleth_areas(upg, v);
    const auto areas_b = choropleth_areas(upg, vs);
    for (std::size_t i = 0; i < areas_a.size(); ++i) {
      if (!close_rel(areas_b[i], areas_a[i] * s * s, 1e-9)) {
        out.push_back("choropleth area " + std::to_string(i) + " is not quadratic in scale" + at);
        break;
      }
    }
    const double ha = hexgrid_layout(hexes, v).width, hb = hexgrid_layout(hexes, vs).width;
    if (!close_rel(hb, ha * s, 1e-9)) out.push_back("hex width " + fmt(ha) + " -> " + fmt(hb) + at);
    if (!close_rel(hex_area(hb), hex_area(ha) * s * s, 1e-9)) out.push_back("hex area not quadratic" + at);
    for (auto o : {Orientation::vertical, Orientation::horizontal}) {
      const double wa = waffle_layout(groups, v, o).side, wb = waffle_layout(groups, vs, o).side;
      if (!close_rel(wb, wa * s, 1e-9)) out.push_back("waffle side " + fmt(wa) + " -> " + fmt(wb) + at);
    }
  }
  return out;
}

Failures check_dorling(const std::vector<unsigned>& seeds) {
  Failures out;
  const Engine world = load_engine("population_world");
  const auto& p = std::get<DorlingParams>(world.spec().views[1].params);
  const ProjectedGeo pg = project(geo_of(world), p.projection);
  std::vector<double> radii;
  for (std::size_t i = 0; i < geo_of(world).features.size(); ++i) {
    radii.push_back(p.scale_factor * std::sqrt(geo_of(world).number(i, "population")));
  }
  // Pixels per content unit at the largest landscape viewport.
  const double px = fit_content(Viewport(1600, 1000), pg.box()).scale;
  for (unsigned seed : seeds) {
    const DorlingResult a = dorling_relax(pg.centroids, radii, seed, p.max_iterations);
    const DorlingResult b = dorling_relax(pg.centroids, radii, seed, p.max_iterations);
    if (a.centers != b.centers) out.push_back("seed " + std::to_string(seed) + ": relaxation is not deterministic");
    double worst = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
      for (std::size_t j = i + 1; j < radii.size(); ++j) {
        const double d = std::hypot(a.centers[i].x - a.centers[j].x, a.centers[i].y - a.centers[j].y);
        worst = std::max(worst, radii[i] + radii[j] - d);
      }
    }
    if (worst * px > p.epsilon) {
      out.push_back("seed " + std::to_string(seed) + ": overlap " + fmt(worst * px) + " px exceeds " + fmt(p.epsilon));
    }
    if (std::abs(worst - a.residual_overlap) > 1e-9 * std::max(1.0, worst)) {
      out.push_back("seed " + std::to_string(seed) + ": reported residual " + fmt(a.residual_overlap) + " vs " +
                    fmt(worst));
    }
  }
  return out;
}

Failures check_monotonicity(std::mt19937& rng, int pairs_per_spec) {
  Failures out;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const char* name : {"population_world", "population_americas", "uk_election", "movies", "miserables",
                           "device_breakpoint"}) {
    const Engine engine = load_engine(name);
    for (int t = 0; t < pairs_per_spec; ++t) {
      const Viewport v(1.0 + 1200.0 * u(rng), 1.0 + 800.0 * u(rng));
      const Viewport big(v.width() + 400.0 * u(rng), v.height() + 300.0 * u(rng));
      for (std::size_t i = 0; i < engine.view_count(); ++i) {
        const auto& view = engine.view(i);
        if (!view.has_constraints(ConstraintSubset::size_monotone)) continue;
        const auto a = view.evaluate(v, ConstraintSubset::size_monotone, EvalMode::report);
        const auto b = view.evaluate(big, ConstraintSubset::size_monotone, EvalMode::report);
        for (std::size_t k = 0; k < a.results.size(); ++k) {
          if (a.results[k].passed && !b.results[k].passed) {
            out.push_back(std::string(name) + "/" + view.id() + " " + std::string(to_string(a.results[k].kind)) +
                          " passes at " + fmt(v.width()) + "x" + fmt(v.height()) + " but fails at " +
                          fmt(big.width()) + "x" + fmt(big.height()));
          }
        }
      }
    }
  }
  return out;
}

Failures check_diff_identity() {
  Failures out;
  for (const char* name : {"population_world", "uk_election", "miserables"}) {
    const Engine engine = load_engine(name);
    LandscapeRegion region = engine.spec().landscape;
    region.step = 16;
    const ViewLandscape l = compute_landscape(engine, region);
    const DiffReport d = diff_landscape(l, l);
    if (d.changed_cells != 0 || d.changed_fraction != 0.0) out.push_back(std::string(name) + ": diff(a,a) changed cells");
    if (d.total_cells != l.cells.size()) out.push_back(std::string(name) + ": diff total cell count");
    for (const auto& [label, delta] : d.area_delta) {
      if (delta != 0.0) out.push_back(std::string(name) + ": area delta for " + label);
    }
  }
  return out;
}

Failures check_round_trips(std::mt19937& rng) {
  Failures out;
  for (const char* name : {"population_world", "population_americas", "uk_election", "movies", "miserables",
                           "bar_orientation", "device_breakpoint"}) {
    const ResponsiveSpec spec = load_spec(name);
    const std::string text = serialize_spec(spec);
    const ResponsiveSpec again = parse_spec(text);
    if (!(again == spec)) out.push_back(std::string(name) + ": spec changes through serialize/parse");
    if (serialize_spec(again) != text) out.push_back(std::string(name) + ": serialized spec is not a fixed point");
  }
  for (int t = 0; t < 50; ++t) {
    const ResponsiveSpec spec = random_geo_spec(rng);
    if (!(parse_spec(serialize_spec(spec)) == spec)) out.push_back("random spec " + std::to_string(t) + " round trip");
  }

  for (const char* name : {"population_world", "uk_election"}) {
    const Engine engine = load_engine(name);
    const auto& geo = geo_of(engine);
    GeoLoadOptions opts;
    opts.value_fields = geo.value_fields;
    opts.category_fields = geo.category_fields;
    if (geo.has_hex_coords()) opts.hex_sidecar = to_hex_sidecar(geo);
    if (!(load_geo(to_geojson(geo), opts) == geo)) out.push_back(std::string(name) + ": geo round trip");
  }
  {
    const Engine engine = load_engine("miserables");
    const auto& net = std::get<Network>(engine.data());
    if (!(load_network(to_node_link_json(net)) == net)) out.push_back("network round trip");
  }
  {
    const Engine engine = load_engine("movies");
    const auto& table = std::get<Table>(engine.data());
    std::map<std::string, ColumnKind> kinds;
    for (const auto& c : table.columns) kinds[c.name] = c.kind;
    if (!(load_table(to_csv(table), kinds) == table)) out.push_back("table round trip");
  }
  {
    const Engine engine = load_engine("uk_election");
    LandscapeRegion region = engine.spec().landscape;
    region.step = 20;
    const ViewLandscape l = compute_landscape(engine, region);
    if (!(landscape_from_json(to_json(l)) == l)) out.push_back("landscape json round trip");
  }
  return out;
}

std::string join(const Failures& f, std::size_t limit) {
  std::string out;
  for (std::size_t i = 0; i < f.size() && i < limit; ++i) out += (i ? "; " : "") + f[i];
  if (f.size() > limit) out += "; ... (" + std::to_string(f.size()) + " total)";
  return out;
}

}  // namespace vstest
