#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "viewstack/errors.hpp"
#include "viewstack/render.hpp"

using namespace viewstack;

namespace {

ViewLandscape at_step(const Engine& e, double step, LandscapeMode mode, unsigned threads = 0) {
  LandscapeRegion r = e.spec().landscape;
  r.step = step;
  LandscapeOptions o;
  o.mode = mode;
  o.threads = threads;
  return compute_landscape(e, r, o);
}

}  // namespace

TEST(Landscape, GridCount) {
  EXPECT_EQ(grid_count(0, 1600, 8), 200u);
  EXPECT_EQ(grid_count(0, 1001, 8), 126u);
  EXPECT_EQ(grid_count(10, 11, 8), 1u);
}

TEST(Landscape, CellsSampleAtMinimumCornerClampedToOnePixel) {
  const Engine e = vstest::load_engine("bar_orientation");
  const ViewLandscape l = at_step(e, 8, LandscapeMode::full_scan);
  EXPECT_EQ(l.cols, 200u);
  EXPECT_EQ(l.rows, 125u);
  EXPECT_DOUBLE_EQ(l.sample_width(0), 1.0);
  EXPECT_DOUBLE_EQ(l.sample_width(3), 24.0);
  EXPECT_DOUBLE_EQ(l.edge_x(200), 1600.0);
  EXPECT_EQ(l.labels, (std::vector<std::string>{"bar_vertical", "bar_horizontal", "fallback", "error"}));
  EXPECT_EQ(l.label_at(100, 10), "bar_vertical");  // 800 x 80
  EXPECT_EQ(l.label_at(10, 100), "bar_horizontal");
}

TEST(Landscape, FastEqualsFullOnUk) {
  const Engine e = vstest::load_engine("uk_election");
  EXPECT_EQ(at_step(e, 8, LandscapeMode::monotone_fast).cells, at_step(e, 8, LandscapeMode::full_scan).cells);
}

TEST(Landscape, FastEqualsFullOnRandomStacks) {
  std::mt19937 rng(4);
  for (int s = 0; s < 15; ++s) {
    ResponsiveSpec spec = vstest::random_geo_spec(rng);
    spec.landscape = {0, 800, 0, 600, 10};
    const Engine e(spec, std::make_shared<const Dataset>(vstest::synthetic_geo(rng, 20)));
    ASSERT_EQ(at_step(e, 10, LandscapeMode::monotone_fast).cells, at_step(e, 10, LandscapeMode::full_scan).cells)
        << serialize_spec(spec);
  }
}

TEST(Landscape, ThreadCountDoesNotChangeResult) {
  const Engine e = vstest::load_engine("population_world");
  for (auto mode : {LandscapeMode::monotone_fast, LandscapeMode::full_scan}) {
    EXPECT_EQ(at_step(e, 16, mode, 1), at_step(e, 16, mode, 4));
  }
}

TEST(Landscape, ProvenanceMatchesEngine) {
  const Engine e = vstest::load_engine("miserables");
  EXPECT_EQ(at_step(e, 40, LandscapeMode::monotone_fast).provenance, e.provenance());
}

TEST(Landscape, RejectsBadRegion) {
  const Engine e = vstest::load_engine("miserables");
  EXPECT_THROW(compute_landscape(e, LandscapeRegion{0, 100, 0, 100, 0.5}), ValidationError);
  EXPECT_THROW(compute_landscape(e, LandscapeRegion{100, 100, 0, 100, 4}), ValidationError);
}

TEST(Breakpoints, DeviceBreakpointIsOneVerticalLine) {
  const Engine e = vstest::load_engine("device_breakpoint");
  const ViewLandscape l = at_step(e, 8, LandscapeMode::monotone_fast);
  const BreakpointSet b = extract_breakpoints(l);
  ASSERT_EQ(b.boundaries.size(), 1u);
  ASSERT_EQ(b.boundaries[0].polylines.size(), 1u);
  const auto& line = b.boundaries[0].polylines[0];
  ASSERT_GE(line.size(), 2u);
  for (const auto& p : line) EXPECT_DOUBLE_EQ(p.x, line.front().x);
  double lo = line.front().y, hi = line.front().y;
  for (const auto& p : line) {
    lo = std::min(lo, p.y);
    hi = std::max(hi, p.y);
  }
  EXPECT_DOUBLE_EQ(lo, 0.0);
  EXPECT_DOUBLE_EQ(hi, 1000.0);
}

TEST(Breakpoints, SharesSumToOne) {
  const Engine e = vstest::load_engine("uk_election");
  const ViewLandscape l = at_step(e, 16, LandscapeMode::monotone_fast);
  const BreakpointSet b = extract_breakpoints(l);
  double total = 0.0;
  for (const auto& [label, share] : b.area_shares) total += share;
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_EQ(b.area_shares.size(), l.labels.size());
  for (std::size_t i = 1; i < b.boundaries.size(); ++i) {
    EXPECT_LT(std::tie(b.boundaries[i - 1].a, b.boundaries[i - 1].b), std::tie(b.boundaries[i].a, b.boundaries[i].b));
  }
}

TEST(Diff, IdentityAndMismatch) {
  const auto failures = vstest::check_diff_identity();
  EXPECT_TRUE(failures.empty()) << vstest::join(failures);

  const Engine e = vstest::load_engine("bar_orientation");
  EXPECT_THROW(diff_landscape(at_step(e, 8, LandscapeMode::monotone_fast), at_step(e, 16, LandscapeMode::monotone_fast)),
               ValidationError);
}

TEST(Diff, WorldVersusAmericas) {
  const Engine world = vstest::load_engine("population_world");
  const Engine americas = vstest::load_engine("population_americas");
  const ViewLandscape a = at_step(world, 16, LandscapeMode::monotone_fast);
  const ViewLandscape b = at_step(americas, 16, LandscapeMode::monotone_fast);
  const DiffReport d = diff_landscape(a, b);
  EXPECT_GT(d.changed_fraction, 0.01);
  double sum = 0.0;
  for (const auto& [label, delta] : d.area_delta) sum += delta;
  EXPECT_NEAR(sum, 0.0, 1e-12);
  const auto j = to_json(d);
  EXPECT_EQ(j.at("total_cells"), d.total_cells);
}

TEST(Json, LandscapeRoundTripAndRejects) {
  const Engine e = vstest::load_engine("miserables");
  const ViewLandscape l = at_step(e, 20, LandscapeMode::monotone_fast);
  EXPECT_EQ(landscape_from_json(to_json(l)), l);
  auto j = to_json(l);
  j.erase("cells");
  EXPECT_ANY_THROW(landscape_from_json(j));
}

TEST(Render, DeterministicPngAndSvg) {
  const Engine e = vstest::load_engine("uk_election");
  const ViewLandscape l = at_step(e, 20, LandscapeMode::monotone_fast);
  RenderOptions o;
  o.marker = Point{800, 500};
  const std::string png = render_landscape(l, ImageFormat::png, o);
  ASSERT_GT(png.size(), 8u);
  EXPECT_EQ(png.substr(0, 8), std::string("\x89PNG\r\n\x1a\n", 8));
  EXPECT_EQ(png, render_landscape(l, ImageFormat::png, o));
  const std::string svg = render_landscape(l, ImageFormat::svg, o);
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("hex_map"), std::string::npos);
  EXPECT_EQ(svg, render_landscape(l, ImageFormat::svg, o));
  EXPECT_EQ(label_color(l, l.fallback_label()), kFallbackColor);
  EXPECT_EQ(label_color(l, l.error_label()), kErrorColor);
  EXPECT_FALSE(image_format_from_string("gif"));
}
