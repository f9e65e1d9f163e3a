// Oracles and property checks shared by the unit tests and the acceptance run.
#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "viewstack/constraints.hpp"
#include "viewstack/engine.hpp"
#include "viewstack/landscape.hpp"

namespace vstest {

using namespace viewstack;

std::string data_path(const std::string& relative);
std::string spec_path(const std::string& name);

ResponsiveSpec load_spec(const std::string& name);
Engine load_engine(const std::string& name, const std::string& data_override = {});
Engine load_engine(ResponsiveSpec spec, const std::string& base_dir);

// ---- oracles ----

/// Plain double loop over all pairs in (i, j) order.
double brute_overplotting(const std::vector<Circle>& marks);

/// Intersection area of two disks by midpoint integration of vertical chords,
/// divided by the smaller disk's area.
double integrated_overlap(double r1, double r2, double d, int samples = 400000);

/// Random marks; `mode` picks a layout style (uniform, clustered, lattice).
std::vector<Circle> random_marks(std::mt19937& rng, std::size_t n, int mode);

/// Evaluates every view fully and takes the first that passes.
struct OracleChoice {
  std::size_t index = 0;
  bool fallback = false;
};
OracleChoice oracle_select(const Engine& engine, const Viewport& v);

/// Largest side at which the grouped squares fit, found by testing every
/// candidate side for feasibility.
double brute_waffle_side(const std::vector<std::size_t>& group_sizes, double across, double along, int gap);

/// Synthetic square countries with hex positions and categories.
GeoFeatureCollection synthetic_geo(std::mt19937& rng, std::size_t n);

/// Random stack of 1 to 5 geo views with random applicable constraints.
ResponsiveSpec random_geo_spec(std::mt19937& rng);

/// Area of a lon/lat rectangle on the unit sphere.
double spherical_rect_area(double lon0, double lat0, double lon1, double lat1);

/// Smallest width (to `tol`) at which view `i` passes on the line h = w / aspect,
/// or a negative value when it fails up to `hi`.
double min_passing_width(const Engine& engine, std::size_t i, double aspect, double lo, double hi, double tol = 0.25);

/// Share of cells carrying any of `labels`.
double label_share(const ViewLandscape& l, const std::vector<std::string>& labels);

/// True when every cell up-right of a `label` cell also carries `label`.
bool monotone_upward(const ViewLandscape& l, const std::string& label);

// ---- property suites (each returns failure messages; empty means pass) ----

using Failures = std::vector<std::string>;

Failures check_scale_laws(std::mt19937& rng, int trials);
Failures check_dorling(const std::vector<unsigned>& seeds);
Failures check_monotonicity(std::mt19937& rng, int pairs_per_spec);
Failures check_diff_identity();
Failures check_round_trips(std::mt19937& rng);

std::string join(const Failures& f, std::size_t limit = 5);

}  // namespace vstest
