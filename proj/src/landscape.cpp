#include "viewstack/landscape.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <thread>

#include "viewstack/errors.hpp"
#include "viewstack/json_format.hpp"

namespace viewstack {

using nlohmann::json;

std::string_view to_string(LandscapeMode mode) { return mode == LandscapeMode::full_scan ? "full" : "fast"; }

std::optional<LandscapeMode> landscape_mode_from_string(std::string_view name) {
  if (name == "full" || name == "full_scan") return LandscapeMode::full_scan;
  if (name == "fast" || name == "monotone_fast") return LandscapeMode::monotone_fast;
  return std::nullopt;
}

std::size_t grid_count(double lo, double hi, double step) {
  return static_cast<std::size_t>(std::ceil((hi - lo) / step - 1e-9));
}

double ViewLandscape::sample_width(std::size_t col) const {
  return std::max(1.0, region.w_min + static_cast<double>(col) * region.step);
}

double ViewLandscape::sample_height(std::size_t row) const {
  return std::max(1.0, region.h_min + static_cast<double>(row) * region.step);
}

double ViewLandscape::edge_x(std::size_t k) const {
  return std::min(region.w_max, region.w_min + static_cast<double>(k) * region.step);
}

double ViewLandscape::edge_y(std::size_t k) const {
  return std::min(region.h_max, region.h_min + static_cast<double>(k) * region.step);
}

namespace {

void check_region(const LandscapeRegion& r) {
  if (!(r.w_max > r.w_min && r.h_max > r.h_min && r.w_min >= 0 && r.h_min >= 0)) {
    throw ValidationError("landscape region must have positive extent");
  }
  if (!(r.step >= 1.0)) throw ValidationError("landscape step must be at least 1 px");
}

class ColumnScanner {
 public:
  ColumnScanner(const Engine& engine, ViewLandscape& l) : engine_(engine), l_(l) {}

  /// Returns layout error messages met in the column.
  std::vector<std::string> full(std::size_t c) {
    std::vector<std::string> errors;
    const double w = l_.sample_width(c);
    for (std::size_t r = 0; r < l_.rows; ++r) {
      std::uint16_t label;
      try {
        label = static_cast<std::uint16_t>(engine_.select_index(Viewport(w, l_.sample_height(r))));
      } catch (const std::exception& e) {
        label = l_.error_label();
        errors.push_back(e.what());
      }
      l_.cells[r * l_.cols + c] = label;
    }
    return errors;
  }

  std::vector<std::string> fast(std::size_t c) {
    try {
      fast_unchecked(c);
      return {};
    } catch (const std::exception&) {
      known_.clear();
      return full(c);
    }
  }

 private:
  /// Lowest passing row for view i at width w, given that every row at or
  /// above `hi` is already known to pass.
  std::size_t find_frontier(std::size_t i, double w, std::size_t hi) const {
    auto passes = [&](std::size_t r) {
      return engine_.view_passes(i, Viewport(w, l_.sample_height(r)), ConstraintSubset::size_monotone);
    };
    // Gallop down from the known bound, then bisect the last gap.
    std::size_t lo = 0;
    for (std::size_t stride = 1; hi > 0; stride *= 2) {
      const std::size_t probe = hi > stride ? hi - stride : 0;
      if (!passes(probe)) {
        lo = probe + 1;
        break;
      }
      hi = probe;
    }
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (passes(mid)) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    return hi;
  }

  void fast_unchecked(std::size_t c) {
    const double w = l_.sample_width(c);
    const std::size_t views = engine_.view_count();
    // Lowest row at which each view's size constraints pass. They are
    // monotone in both height and width, so a frontier found for a narrower
    // column bounds this one from above.
    std::vector<std::size_t> frontier(views, 0);
    for (std::size_t i = 0; i < views; ++i) {
      if (!engine_.view(i).has_constraints(ConstraintSubset::size_monotone)) continue;
      const std::size_t hi = known_.empty() ? l_.rows : known_[i];
      frontier[i] = hi == 0 ? 0 : find_frontier(i, w, hi);
    }
    known_ = frontier;
    std::vector<bool> has_aspect(views);
    for (std::size_t i = 0; i < views; ++i) has_aspect[i] = engine_.view(i).has_constraints(ConstraintSubset::aspect);
    for (std::size_t r = 0; r < l_.rows; ++r) {
      std::uint16_t label = l_.fallback_label();
      const Viewport v(w, l_.sample_height(r));
      for (std::size_t i = 0; i < views; ++i) {
        if (r < frontier[i]) continue;
        if (has_aspect[i] && !engine_.view_passes(i, v, ConstraintSubset::aspect)) continue;
        label = static_cast<std::uint16_t>(i);
        break;
      }
      l_.cells[r * l_.cols + c] = label;
    }
  }

  const Engine& engine_;
  ViewLandscape& l_;
  /// Frontiers of the last column this scanner handled; columns arrive in
  /// increasing order, so they are valid upper bounds.
  std::vector<std::size_t> known_;
};

}  // namespace

ViewLandscape compute_landscape(const Engine& engine, const LandscapeOptions& options) {
  return compute_landscape(engine, engine.spec().landscape, options);
}

ViewLandscape compute_landscape(const Engine& engine, const LandscapeRegion& region, const LandscapeOptions& options) {
  check_region(region);
  ViewLandscape l;
  l.region = region;
  l.cols = grid_count(region.w_min, region.w_max, region.step);
  l.rows = grid_count(region.h_min, region.h_max, region.step);
  for (std::size_t i = 0; i < engine.view_count(); ++i) l.labels.push_back(engine.view(i).id());
  l.labels.push_back(kFallbackLabel);
  l.labels.push_back(kErrorLabel);
  l.cells.assign(l.cols * l.rows, 0);
  l.provenance = engine.provenance();

  std::vector<std::vector<std::string>> column_errors(l.cols);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    ColumnScanner scanner(engine, l);
    for (std::size_t c = next++; c < l.cols; c = next++) {
      column_errors[c] = options.mode == LandscapeMode::full_scan ? scanner.full(c) : scanner.fast(c);
    }
  };
  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, l.cols)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  std::set<std::string> seen;
  for (const auto& errs : column_errors) {
    for (const auto& e : errs) {
      if (seen.insert(e).second) l.errors.push_back(e);
    }
  }
  return l;
}

namespace {

struct GridPoint {
  std::size_t x = 0;
  std::size_t y = 0;
  auto operator<=>(const GridPoint&) const = default;
};

using Segment = std::pair<GridPoint, GridPoint>;

std::vector<std::vector<GridPoint>> chain(const std::vector<Segment>& segments) {
  std::map<GridPoint, std::vector<std::size_t>> at;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    at[segments[i].first].push_back(i);
    at[segments[i].second].push_back(i);
  }
  std::vector<bool> used(segments.size(), false);
  std::vector<std::vector<GridPoint>> out;

  auto walk = [&](GridPoint start) {
    std::vector<GridPoint> line{start};
    GridPoint cur = start;
    for (;;) {
      std::size_t next = segments.size();
      for (std::size_t s : at[cur]) {
        if (!used[s]) {
          next = s;
          break;
        }
      }
      if (next == segments.size()) break;
      used[next] = true;
      cur = segments[next].first == cur ? segments[next].second : segments[next].first;
      line.push_back(cur);
      if (at[cur].size() != 2) break;
    }
    return line;
  };

  // Open chains start at junctions or ends; what remains are closed loops.
  for (const auto& [p, segs] : at) {
    if (segs.size() == 2) continue;
    for (std::size_t s : segs) {
      if (!used[s]) out.push_back(walk(p));
    }
  }
  for (std::size_t s = 0; s < segments.size(); ++s) {
    if (!used[s]) out.push_back(walk(segments[s].first));
  }

  // Drop collinear interior points.
  for (auto& line : out) {
    if (line.size() < 3) continue;
    std::vector<GridPoint> simple{line.front()};
    for (std::size_t i = 1; i + 1 < line.size(); ++i) {
      const auto& a = simple.back();
      const auto& b = line[i];
      const auto& c = line[i + 1];
      const bool collinear = (a.x == b.x && b.x == c.x) || (a.y == b.y && b.y == c.y);
      if (!collinear) simple.push_back(b);
    }
    simple.push_back(line.back());
    line = std::move(simple);
  }
  return out;
}

}  // namespace

BreakpointSet extract_breakpoints(const ViewLandscape& l) {
  BreakpointSet out;
  std::map<std::pair<std::uint16_t, std::uint16_t>, std::vector<Segment>> edges;
  auto key = [](std::uint16_t a, std::uint16_t b) { return std::make_pair(std::min(a, b), std::max(a, b)); };
  for (std::size_t r = 0; r < l.rows; ++r) {
    for (std::size_t c = 0; c < l.cols; ++c) {
      const auto here = l.at(c, r);
      if (c + 1 < l.cols && l.at(c + 1, r) != here) {
        edges[key(here, l.at(c + 1, r))].push_back({{c + 1, r}, {c + 1, r + 1}});
      }
      if (r + 1 < l.rows && l.at(c, r + 1) != here) {
        edges[key(here, l.at(c, r + 1))].push_back({{c, r + 1}, {c + 1, r + 1}});
      }
    }
  }
  for (const auto& [pair, segs] : edges) {
    Boundary b{l.labels[pair.first], l.labels[pair.second], {}};
    for (const auto& line : chain(segs)) {
      std::vector<Point> pts;
      for (const auto& p : line) pts.push_back({l.edge_x(p.x), l.edge_y(p.y)});
      b.polylines.push_back(std::move(pts));
    }
    out.boundaries.push_back(std::move(b));
  }
  std::sort(out.boundaries.begin(), out.boundaries.end(),
            [](const Boundary& x, const Boundary& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });

  std::vector<std::size_t> counts(l.labels.size(), 0);
  for (auto cell : l.cells) ++counts[cell];
  const double total = static_cast<double>(l.cells.size());
  for (std::size_t i = 0; i < l.labels.size(); ++i) {
    out.area_shares[l.labels[i]] = total > 0 ? counts[i] / total : 0.0;
  }
  return out;
}

DiffReport diff_landscape(const ViewLandscape& a, const ViewLandscape& b) {
  if (!(a.region == b.region) || a.cols != b.cols || a.rows != b.rows) {
    throw ValidationError("landscapes differ in region or step and cannot be compared");
  }
  DiffReport out;
  out.total_cells = a.cells.size();
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    out.changed_cells += a.labels[a.cells[i]] != b.labels[b.cells[i]];
  }
  out.changed_fraction = out.total_cells ? static_cast<double>(out.changed_cells) / out.total_cells : 0.0;
  const auto sa = extract_breakpoints(a).area_shares;
  const auto sb = extract_breakpoints(b).area_shares;
  std::set<std::string> names;
  for (const auto& [k, v] : sa) names.insert(k);
  for (const auto& [k, v] : sb) names.insert(k);
  for (const auto& n : names) {
    const double x = sa.count(n) ? sa.at(n) : 0.0;
    const double y = sb.count(n) ? sb.at(n) : 0.0;
    out.area_delta[n] = y - x;
  }
  return out;
}

json to_json(const BreakpointSet& b) {
  json boundaries = json::array();
  for (const auto& bd : b.boundaries) {
    json lines = json::array();
    for (const auto& line : bd.polylines) {
      json pts = json::array();
      for (const auto& p : line) pts.push_back({p.x, p.y});
      lines.push_back(std::move(pts));
    }
    boundaries.push_back({{"between", {bd.a, bd.b}}, {"polylines", std::move(lines)}});
  }
  return {{"boundaries", boundaries}, {"area_shares", b.area_shares}};
}

json to_json(const ViewLandscape& l) {
  json rows = json::array();
  for (std::size_t r = 0; r < l.rows; ++r) {
    json runs = json::array();
    std::size_t c = 0;
    while (c < l.cols) {
      std::size_t end = c;
      while (end < l.cols && l.at(end, r) == l.at(c, r)) ++end;
      runs.push_back(l.at(c, r));
      runs.push_back(end - c);
      c = end;
    }
    rows.push_back(std::move(runs));
  }
  const auto bp = extract_breakpoints(l);
  json out = {{"region", {{"width", {l.region.w_min, l.region.w_max}}, {"height", {l.region.h_min, l.region.h_max}}}},
              {"step", l.region.step},
              {"cols", l.cols},
              {"rows", l.rows},
              {"labels", l.labels},
              {"cells", std::move(rows)},
              {"provenance", {{"spec_hash", l.provenance.spec_hash}, {"data_hash", l.provenance.data_hash}}},
              {"errors", l.errors}};
  const json b = to_json(bp);
  out["area_shares"] = b["area_shares"];
  out["breakpoints"] = b["boundaries"];
  return out;
}

json to_json(const DiffReport& d) {
  return {{"changed_fraction", d.changed_fraction},
          {"changed_cells", d.changed_cells},
          {"total_cells", d.total_cells},
          {"area_delta", d.area_delta}};
}

ViewLandscape landscape_from_json(const json& j) {
  try {
    ViewLandscape l;
    const auto& w = j.at("region").at("width");
    const auto& h = j.at("region").at("height");
    l.region = {w.at(0).get<double>(), w.at(1).get<double>(), h.at(0).get<double>(), h.at(1).get<double>(),
                j.at("step").get<double>()};
    check_region(l.region);
    l.cols = j.at("cols").get<std::size_t>();
    l.rows = j.at("rows").get<std::size_t>();
    if (l.cols != grid_count(l.region.w_min, l.region.w_max, l.region.step) ||
        l.rows != grid_count(l.region.h_min, l.region.h_max, l.region.step)) {
      throw ValidationError("landscape grid size does not match its region and step");
    }
    l.labels = j.at("labels").get<std::vector<std::string>>();
    if (l.labels.size() < 2) throw ValidationError("landscape needs at least the fallback and error labels");
    const auto& rows = j.at("cells");
    if (rows.size() != l.rows) throw ValidationError("landscape row count mismatch");
    l.cells.reserve(l.cols * l.rows);
    for (const auto& runs : rows) {
      std::size_t n = 0;
      for (std::size_t k = 0; k + 1 < runs.size(); k += 2) {
        const auto label = runs[k].get<std::size_t>();
        const auto count = runs[k + 1].get<std::size_t>();
        if (label >= l.labels.size()) throw ValidationError("landscape cell label out of range");
        l.cells.insert(l.cells.end(), count, static_cast<std::uint16_t>(label));
        n += count;
      }
      if (n != l.cols || runs.size() % 2) throw ValidationError("landscape row does not cover every column");
    }
    if (j.contains("provenance")) {
      l.provenance = {j["provenance"].value("spec_hash", ""), j["provenance"].value("data_hash", "")};
    }
    if (j.contains("errors")) l.errors = j["errors"].get<std::vector<std::string>>();
    return l;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed landscape JSON: ") + e.what());
  }
}

}  // namespace viewstack
