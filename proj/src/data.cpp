#include "viewstack/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "viewstack/errors.hpp"

namespace viewstack {

using nlohmann::json;

namespace {

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // The parser counts bytes from 1 and may point one past the end.
    throw ParseError(std::string(what) + ": " + e.what(), std::min(text.size(), e.byte > 0 ? e.byte - 1 : 0));
  }
}

std::string id_string(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  if (j.is_number()) return j.dump();
  return {};
}

std::string number_text(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string join(const std::vector<std::string>& items, std::size_t limit = 20) {
  std::string out;
  for (std::size_t i = 0; i < items.size() && i < limit; ++i) {
    if (i) out += ", ";
    out += items[i];
  }
  if (items.size() > limit) out += ", ... (" + std::to_string(items.size()) + " total)";
  return out;
}

Ring parse_ring(const json& j, const std::string& feature_id) {
  if (!j.is_array()) throw ValidationError("feature " + feature_id + ": ring is not an array");
  Ring ring;
  ring.reserve(j.size());
  for (const auto& p : j) {
    if (!p.is_array() || p.size() < 2 || !p[0].is_number() || !p[1].is_number()) {
      throw ValidationError("feature " + feature_id + ": position must be [lon, lat]");
    }
    LonLat ll{p[0].get<double>(), p[1].get<double>()};
    if (!(ll.lon >= -180.0 && ll.lon <= 180.0 && ll.lat >= -90.0 && ll.lat <= 90.0)) {
      throw ValidationError("feature " + feature_id + ": position out of lon/lat range", {feature_id});
    }
    ring.push_back(ll);
  }
  if (ring.size() < 4 || !(ring.front() == ring.back())) {
    throw ValidationError("feature " + feature_id + ": polygon ring is not closed", {feature_id});
  }
  return ring;
}

Polygon parse_polygon(const json& j, const std::string& feature_id) {
  if (!j.is_array() || j.empty()) {
    throw ValidationError("feature " + feature_id + ": polygon needs at least one ring");
  }
  Polygon poly;
  for (const auto& r : j) poly.rings.push_back(parse_ring(r, feature_id));
  return poly;
}

PropertyValue to_property(const json& j) {
  if (j.is_null()) return std::monostate{};
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  return j.dump();
}

json from_property(const PropertyValue& v) {
  if (std::holds_alternative<double>(v)) return std::get<double>(v);
  if (std::holds_alternative<std::string>(v)) return std::get<std::string>(v);
  return nullptr;
}

json ring_json(const Ring& ring) {
  json out = json::array();
  for (const auto& p : ring) out.push_back({p.lon, p.lat});
  return out;
}

json polygon_json(const Polygon& poly) {
  json out = json::array();
  for (const auto& r : poly.rings) out.push_back(ring_json(r));
  return out;
}

}  // namespace

std::optional<double> parse_number(std::string_view text) {
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

// ---------------------------------------------------------------- geo

bool GeoFeatureCollection::has_hex_coords() const {
  return !features.empty() &&
         std::all_of(features.begin(), features.end(), [](const GeoFeature& f) { return f.hex.has_value(); });
}

std::optional<std::size_t> GeoFeatureCollection::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].id == id) return i;
  }
  return std::nullopt;
}

double GeoFeatureCollection::number(std::size_t i, const std::string& field) const {
  const auto& props = features.at(i).properties;
  auto it = props.find(field);
  if (it == props.end() || !std::holds_alternative<double>(it->second)) {
    throw ValidationError("feature " + features[i].id + " has no numeric property '" + field + "'",
                          {features[i].id});
  }
  return std::get<double>(it->second);
}

std::string GeoFeatureCollection::text(std::size_t i, const std::string& field) const {
  const auto& props = features.at(i).properties;
  auto it = props.find(field);
  if (it == props.end()) return {};
  if (std::holds_alternative<std::string>(it->second)) return std::get<std::string>(it->second);
  if (std::holds_alternative<double>(it->second)) return number_text(std::get<double>(it->second));
  return {};
}

bool GeoFeatureCollection::has_property(const std::string& field) const {
  return std::any_of(features.begin(), features.end(),
                     [&](const GeoFeature& f) { return f.properties.count(field) > 0; });
}

GeoFeatureCollection load_geo(std::string_view text, const GeoLoadOptions& options,
                              std::vector<std::string>* warnings) {
  const json root = parse_json(text, "GeoJSON");
  if (!root.is_object() || root.value("type", "") != "FeatureCollection") {
    throw ValidationError("GeoJSON root must be a FeatureCollection");
  }
  const auto features = root.find("features");
  if (features == root.end() || !features->is_array()) {
    throw ValidationError("FeatureCollection has no 'features' array");
  }
  if (features->empty()) throw ValidationError("FeatureCollection is empty");

  GeoFeatureCollection geo;
  geo.value_fields = options.value_fields;
  geo.category_fields = options.category_fields;
  std::set<std::string> seen;
  std::vector<std::string> duplicates;
  std::size_t index = 0;
  for (const auto& f : *features) {
    GeoFeature feature;
    const json props = f.contains("properties") && f["properties"].is_object() ? f["properties"] : json::object();
    if (!options.id_property.empty()) {
      if (props.contains(options.id_property)) feature.id = id_string(props[options.id_property]);
    } else if (f.contains("id")) {
      feature.id = id_string(f["id"]);
    }
    if (feature.id.empty()) feature.id = "feature-" + std::to_string(index);
    ++index;
    if (!seen.insert(feature.id).second) duplicates.push_back(feature.id);

    for (auto it = props.begin(); it != props.end(); ++it) {
      feature.properties[it.key()] = to_property(it.value());
    }
    const json& geom = f.contains("geometry") ? f["geometry"] : json();
    const std::string type = geom.is_object() ? geom.value("type", "") : "";
    if (type == "Polygon") {
      feature.polygons.push_back(parse_polygon(geom.at("coordinates"), feature.id));
    } else if (type == "MultiPolygon") {
      for (const auto& p : geom.at("coordinates")) feature.polygons.push_back(parse_polygon(p, feature.id));
      if (feature.polygons.empty()) {
        throw ValidationError("feature " + feature.id + ": empty MultiPolygon", {feature.id});
      }
    } else {
      throw ValidationError("feature " + feature.id + ": geometry must be Polygon or MultiPolygon, got '" +
                                type + "'",
                            {feature.id});
    }
    geo.features.push_back(std::move(feature));
  }
  if (!duplicates.empty()) {
    throw ValidationError("duplicate feature ids: " + join(duplicates), duplicates);
  }

  for (const auto& field : options.value_fields) {
    std::vector<std::string> missing;
    for (auto& feature : geo.features) {
      auto it = feature.properties.find(field);
      if (it != feature.properties.end() && std::holds_alternative<std::string>(it->second)) {
        if (auto v = parse_number(std::get<std::string>(it->second))) it->second = *v;
      }
      if (it == feature.properties.end() || !std::holds_alternative<double>(it->second)) {
        missing.push_back(feature.id);
      }
    }
    if (!missing.empty()) {
      throw ValidationError("features missing numeric value field '" + field + "': " + join(missing), missing);
    }
  }

  if (options.hex_sidecar) {
    const json side = parse_json(*options.hex_sidecar, "hex sidecar");
    if (!side.is_object()) throw ValidationError("hex sidecar must be an object keyed by feature id");
    std::set<std::pair<int, int>> cells;
    std::vector<std::string> clashes;
    for (auto it = side.begin(); it != side.end(); ++it) {
      const auto& cell = it.value();
      if (!cell.is_object() || !cell.contains("row") || !cell.contains("col") ||
          !cell["row"].is_number_integer() || !cell["col"].is_number_integer()) {
        throw ValidationError("hex sidecar entry '" + it.key() + "' needs integer row and col", {it.key()});
      }
      auto idx = geo.index_of(it.key());
      if (!idx) {
        if (warnings) warnings->push_back("hex sidecar entry '" + it.key() + "' matches no feature");
        continue;
      }
      HexCoord hc{cell["row"].get<int>(), cell["col"].get<int>()};
      if (!cells.insert({hc.row, hc.col}).second) clashes.push_back(it.key());
      geo.features[*idx].hex = hc;
    }
    if (!clashes.empty()) {
      throw ValidationError("hex sidecar assigns one cell to several features: " + join(clashes), clashes);
    }
    if (warnings) {
      std::size_t without = 0;
      for (const auto& f : geo.features) without += f.hex ? 0 : 1;
      if (without) warnings->push_back(std::to_string(without) + " features have no hex position");
    }
  }
  return geo;
}

std::string to_geojson(const GeoFeatureCollection& geo) {
  json features = json::array();
  for (const auto& f : geo.features) {
    json props = json::object();
    for (const auto& [k, v] : f.properties) props[k] = from_property(v);
    json geom;
    if (f.polygons.size() == 1) {
      geom = {{"type", "Polygon"}, {"coordinates", polygon_json(f.polygons[0])}};
    } else {
      json coords = json::array();
      for (const auto& p : f.polygons) coords.push_back(polygon_json(p));
      geom = {{"type", "MultiPolygon"}, {"coordinates", coords}};
    }
    features.push_back({{"type", "Feature"}, {"id", f.id}, {"properties", props}, {"geometry", geom}});
  }
  return json{{"type", "FeatureCollection"}, {"features", features}}.dump();
}

std::string to_hex_sidecar(const GeoFeatureCollection& geo) {
  json out = json::object();
  for (const auto& f : geo.features) {
    if (f.hex) out[f.id] = {{"row", f.hex->row}, {"col", f.hex->col}};
  }
  return out.dump();
}

// ---------------------------------------------------------------- network

std::vector<std::pair<std::string, std::string>> Network::canonical_links() const {
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(links.size());
  for (const auto& l : links) {
    auto a = nodes[l.source].id;
    auto b = nodes[l.target].id;
    if (b < a) std::swap(a, b);
    out.emplace_back(std::move(a), std::move(b));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Network load_network(std::string_view text, std::vector<std::string>* warnings) {
  const json root = parse_json(text, "node-link JSON");
  if (!root.is_object() || !root.contains("nodes") || !root["nodes"].is_array()) {
    throw ValidationError("node-link JSON needs a 'nodes' array");
  }
  Network net;
  std::map<std::string, std::size_t> index;
  std::vector<std::string> duplicates;
  for (const auto& n : root["nodes"]) {
    NetworkNode node;
    node.id = n.is_object() && n.contains("id") ? id_string(n["id"]) : std::string();
    if (node.id.empty()) throw ValidationError("every node needs an 'id'");
    node.label = n.contains("label") && n["label"].is_string() ? n["label"].get<std::string>() : node.id;
    if (!index.emplace(node.id, net.nodes.size()).second) {
      duplicates.push_back(node.id);
      continue;
    }
    net.nodes.push_back(std::move(node));
  }
  if (!duplicates.empty()) throw ValidationError("duplicate node ids: " + join(duplicates), duplicates);

  std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> merged;
  std::vector<std::string> dangling;
  const json links = root.contains("links") ? root["links"] : json::array();
  if (!links.is_array()) throw ValidationError("'links' must be an array");
  for (const auto& l : links) {
    const std::string s = l.contains("source") ? id_string(l["source"]) : std::string();
    const std::string t = l.contains("target") ? id_string(l["target"]) : std::string();
    auto si = index.find(s);
    auto ti = index.find(t);
    if (si == index.end()) dangling.push_back(s.empty() ? "<missing source>" : s);
    if (ti == index.end()) dangling.push_back(t.empty() ? "<missing target>" : t);
    if (si == index.end() || ti == index.end()) continue;
    double weight = 1.0;
    if (l.contains("weight")) {
      if (!l["weight"].is_number()) throw ValidationError("link " + s + "-" + t + ": weight must be a number");
      weight = l["weight"].get<double>();
    }
    if (!(weight >= 0.0) || !std::isfinite(weight)) {
      throw ValidationError("link " + s + "-" + t + ": weight must be non-negative");
    }
    if (si->second == ti->second) {
      if (warnings) warnings->push_back("dropped self-loop on node " + s);
      continue;
    }
    auto key = std::minmax(si->second, ti->second);
    merged[{key.first, key.second}].push_back(weight);
  }
  if (!dangling.empty()) {
    throw ValidationError("links reference unknown nodes: " + join(dangling), dangling);
  }
  for (auto& [key, weights] : merged) {
    std::sort(weights.begin(), weights.end());
    double sum = 0.0;
    for (double w : weights) sum += w;
    net.links.push_back({key.first, key.second, sum});
  }
  return net;
}

std::string to_node_link_json(const Network& network) {
  json nodes = json::array();
  for (const auto& n : network.nodes) nodes.push_back({{"id", n.id}, {"label", n.label}});
  json links = json::array();
  for (const auto& l : network.links) {
    links.push_back({{"source", network.nodes[l.source].id},
                     {"target", network.nodes[l.target].id},
                     {"weight", l.weight}});
  }
  return json{{"nodes", nodes}, {"links", links}}.dump();
}

// ---------------------------------------------------------------- table

namespace {

std::vector<std::vector<std::string>> parse_csv_records(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    records.push_back(std::move(record));
    record.clear();
    field_started = false;
  };
  std::size_t i = 0;
  if (text.substr(0, 3) == "\xEF\xBB\xBF") i = 3;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty()) throw ParseError("CSV line " + std::to_string(line) + ": stray quote", i);
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        [[fallthrough]];
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (in_quotes) throw ParseError("CSV: unterminated quoted field", text.size());
  if (field_started || !record.empty()) end_record();
  return records;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::optional<std::size_t> Table::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<std::optional<double>> Table::numeric(std::string_view name) const {
  auto idx = column_index(name);
  if (!idx) throw ValidationError("table has no column '" + std::string(name) + "'");
  std::vector<std::optional<double>> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(parse_number(row[*idx]));
  return out;
}

std::vector<std::string> Table::text(std::string_view name) const {
  auto idx = column_index(name);
  if (!idx) throw ValidationError("table has no column '" + std::string(name) + "'");
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row[*idx]);
  return out;
}

Table load_table(std::string_view text, const std::map<std::string, ColumnKind>& kind_overrides) {
  auto records = parse_csv_records(text);
  if (records.empty()) throw ValidationError("CSV is empty: a header row is required");
  Table table;
  for (auto& name : records.front()) table.columns.push_back({name, ColumnKind::categorical});
  const std::size_t width = table.columns.size();
  for (std::size_t r = 1; r < records.size(); ++r) {
    auto& rec = records[r];
    if (rec.size() == 1 && rec[0].empty() && width != 1) continue;  // blank line
    if (rec.size() != width) {
      throw ValidationError("CSV row " + std::to_string(r) + " has " + std::to_string(rec.size()) +
                            " cells, header has " + std::to_string(width));
    }
    table.rows.push_back(std::move(rec));
  }
  for (std::size_t c = 0; c < width; ++c) {
    auto& col = table.columns[c];
    if (auto it = kind_overrides.find(col.name); it != kind_overrides.end()) {
      col.kind = it->second;
      continue;
    }
    std::size_t non_empty = 0;
    std::size_t numeric = 0;
    for (const auto& row : table.rows) {
      if (row[c].find_first_not_of(" \t") == std::string::npos) continue;
      ++non_empty;
      if (parse_number(row[c])) ++numeric;
    }
    if (non_empty > 0 && static_cast<double>(numeric) >= kNumericInferenceThreshold * static_cast<double>(non_empty)) {
      col.kind = ColumnKind::numeric;
    }
  }
  return table;
}

std::string to_csv(const Table& table) {
  std::ostringstream out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out << ',';
    out << csv_escape(table.columns[c].name);
  }
  out << "\r\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      out << csv_escape(row[c]);
    }
    out << "\r\n";
  }
  return out.str();
}

Table table_from_geo(const GeoFeatureCollection& geo) {
  std::set<std::string> names;
  for (const auto& f : geo.features) {
    for (const auto& [k, v] : f.properties) names.insert(k);
  }
  names.erase("id");
  Table table;
  table.columns.push_back({"id", ColumnKind::categorical});
  for (const auto& n : names) {
    bool all_numeric = true;
    for (const auto& f : geo.features) {
      auto it = f.properties.find(n);
      if (it != f.properties.end() && std::holds_alternative<std::string>(it->second)) all_numeric = false;
    }
    table.columns.push_back({n, all_numeric ? ColumnKind::numeric : ColumnKind::categorical});
  }
  for (std::size_t i = 0; i < geo.features.size(); ++i) {
    std::vector<std::string> row{geo.features[i].id};
    for (const auto& n : names) row.push_back(geo.text(i, n));
    table.rows.push_back(std::move(row));
  }
  return table;
}

// ---------------------------------------------------------------- dataset

DatasetKind kind_of(const Dataset& data) {
  return static_cast<DatasetKind>(data.index());
}

std::string_view to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::geo: return "geo";
    case DatasetKind::network: return "network";
    case DatasetKind::table: return "table";
  }
  return "unknown";
}

json dataset_to_json(const Dataset& data) {
  return std::visit(
      [](const auto& d) -> json {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, GeoFeatureCollection>) {
          return {{"kind", "geo"},
                  {"geojson", json::parse(to_geojson(d))},
                  {"hex", json::parse(to_hex_sidecar(d))},
                  {"value_fields", d.value_fields},
                  {"category_fields", d.category_fields}};
        } else if constexpr (std::is_same_v<T, Network>) {
          return {{"kind", "network"}, {"network", json::parse(to_node_link_json(d))}};
        } else {
          json cols = json::array();
          for (const auto& c : d.columns) {
            cols.push_back({{"name", c.name}, {"kind", c.kind == ColumnKind::numeric ? "numeric" : "categorical"}});
          }
          return {{"kind", "table"}, {"columns", cols}, {"rows", d.rows}};
        }
      },
      data);
}

}  // namespace viewstack
