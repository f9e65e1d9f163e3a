#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace viewstack {

struct LonLat {
  double lon = 0.0;
  double lat = 0.0;
  bool operator==(const LonLat&) const = default;
};

/// Closed ring: first position equals last.
using Ring = std::vector<LonLat>;

/// Outer ring first, holes after.
struct Polygon {
  std::vector<Ring> rings;
  bool operator==(const Polygon&) const = default;
};

/// Position on a hex grid. Rows grow northward (hexjson convention).
struct HexCoord {
  int row = 0;
  int col = 0;
  bool operator==(const HexCoord&) const = default;
};

/// A property is null, a number, or a string.
using PropertyValue = std::variant<std::monostate, double, std::string>;

struct GeoFeature {
  std::string id;
  std::vector<Polygon> polygons;
  std::map<std::string, PropertyValue> properties;
  std::optional<HexCoord> hex;
  bool operator==(const GeoFeature&) const = default;
};

struct GeoFeatureCollection {
  std::vector<GeoFeature> features;
  std::vector<std::string> value_fields;
  std::vector<std::string> category_fields;

  bool has_hex_coords() const;
  std::optional<std::size_t> index_of(std::string_view id) const;
  /// Numeric property of feature `i`; throws if absent or non-numeric.
  double number(std::size_t i, const std::string& field) const;
  /// Property of feature `i` rendered as text; empty when absent.
  std::string text(std::size_t i, const std::string& field) const;
  bool has_property(const std::string& field) const;

  bool operator==(const GeoFeatureCollection&) const = default;
};

struct GeoLoadOptions {
  std::vector<std::string> value_fields;
  std::vector<std::string> category_fields;
  /// Text of a hex sidecar: {"<feature id>": {"row": int, "col": int}, ...}
  std::optional<std::string> hex_sidecar;
  /// Read feature ids from this property instead of the GeoJSON "id" member.
  std::string id_property;
};

/// Parses a GeoJSON FeatureCollection of Polygon/MultiPolygon features.
/// Throws ParseError (with byte offset) or ValidationError.
GeoFeatureCollection load_geo(std::string_view text, const GeoLoadOptions& options,
                              std::vector<std::string>* warnings = nullptr);

std::string to_geojson(const GeoFeatureCollection& geo);
std::string to_hex_sidecar(const GeoFeatureCollection& geo);

struct NetworkNode {
  std::string id;
  std::string label;
  bool operator==(const NetworkNode&) const = default;
};

/// Undirected link between node indices; `source < target` after loading.
struct NetworkLink {
  std::size_t source = 0;
  std::size_t target = 0;
  double weight = 1.0;
  bool operator==(const NetworkLink&) const = default;
};

struct Network {
  std::vector<NetworkNode> nodes;
  std::vector<NetworkLink> links;

  /// Links sorted by (source id, target id) with endpoints ordered by id.
  std::vector<std::pair<std::string, std::string>> canonical_links() const;
  bool operator==(const Network&) const = default;
};

/// Node-link JSON: {"nodes":[{"id","label"}], "links":[{"source","target","weight"}]}.
/// Duplicate undirected links are merged by summing weights; self-loops are
/// dropped with a warning.
Network load_network(std::string_view text, std::vector<std::string>* warnings = nullptr);

std::string to_node_link_json(const Network& network);

enum class ColumnKind { numeric, categorical };

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::categorical;
  bool operator==(const Column&) const = default;
};

struct Table {
  std::vector<Column> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t row_count() const { return rows.size(); }
  std::optional<std::size_t> column_index(std::string_view name) const;
  /// Parsed numeric cells of a column; std::nullopt marks a missing value.
  std::vector<std::optional<double>> numeric(std::string_view name) const;
  std::vector<std::string> text(std::string_view name) const;

  bool operator==(const Table&) const = default;
};

/// Share of non-empty cells that must parse as numbers for a column to be
/// inferred numeric.
inline constexpr double kNumericInferenceThreshold = 0.95;

/// RFC 4180 CSV with a header row. `kind_overrides` pins a column's kind.
Table load_table(std::string_view text,
                 const std::map<std::string, ColumnKind>& kind_overrides = {});

std::string to_csv(const Table& table);

/// Tabular view of a feature collection: an "id" column followed by every
/// property.
Table table_from_geo(const GeoFeatureCollection& geo);

using Dataset = std::variant<GeoFeatureCollection, Network, Table>;

enum class DatasetKind { geo, network, table };

DatasetKind kind_of(const Dataset& data);
std::string_view to_string(DatasetKind kind);

/// Canonical JSON form of any dataset (used for hashing and round trips).
nlohmann::json dataset_to_json(const Dataset& data);

/// Parses a number the way table and property inference does: finite decimal
/// or exponent notation, surrounding whitespace allowed.
std::optional<double> parse_number(std::string_view text);

}  // namespace viewstack
