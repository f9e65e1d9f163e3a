#include <gtest/gtest.h>

#include "support.hpp"
#include "viewstack/errors.hpp"

using namespace viewstack;

TEST(Selector, PopulationSpotChecks) {
  const Engine e = vstest::load_engine("population_world");
  const Selection large = e.select(Viewport(1200, 700));
  EXPECT_EQ(large.view_id, "circle_map");
  EXPECT_EQ(large.view_index, 0u);
  EXPECT_FALSE(large.fallback);
  ASSERT_EQ(large.evaluations.size(), 1u);

  const Selection mid = e.select(Viewport(500, 400));
  EXPECT_EQ(mid.view_id, "dorling");
  ASSERT_EQ(mid.evaluations.size(), 2u);
  EXPECT_FALSE(mid.evaluations[0].passed);
  EXPECT_TRUE(mid.evaluations[1].passed);

  EXPECT_EQ(e.select(Viewport(300, 500)).view_id, "bar_horizontal");
  EXPECT_EQ(e.select(Viewport(300, 500), true).evaluations.size(), 4u);
}

TEST(Selector, JsonShape) {
  const Engine e = vstest::load_engine("population_world");
  const auto j = to_json(e.select(Viewport(1200, 700)));
  EXPECT_EQ(j.at("view"), "circle_map");
  EXPECT_EQ(j.at("fallback"), false);
  EXPECT_EQ(j.at("index"), 0);
  EXPECT_EQ(j.at("evaluated").size(), 1u);
  EXPECT_EQ(j.at("results").at(0).at("constraint"), "minCircleRadius");
}

TEST(Selector, FallbackWhenNothingPasses) {
  ResponsiveSpec s = vstest::load_spec("bar_orientation");
  s.views[1].constraints.push_back({ConstraintKind::min_bar_count, 500.0, 0.0});
  const Engine e = vstest::load_engine(s, vstest::data_path("specs"));
  const Selection sel = e.select(Viewport(400, 800));
  EXPECT_TRUE(sel.fallback);
  EXPECT_EQ(sel.view_id, "bar_horizontal");
  EXPECT_EQ(sel.view_index, 1u);
  EXPECT_EQ(e.select_index(Viewport(400, 800)), e.view_count());
  EXPECT_EQ(e.select_index(Viewport(800, 400)), 0u);
}

TEST(Selector, DecideModeAgreesWithReportMode) {
  const Engine e = vstest::load_engine("movies");
  for (double w : {80.0, 150.0, 300.0, 900.0}) {
    for (double h : {60.0, 105.0, 400.0}) {
      const Viewport v(w, h);
      const auto& view = e.view(0);
      EXPECT_EQ(view.evaluate(v, ConstraintSubset::all, EvalMode::decide).passed,
                view.evaluate(v, ConstraintSubset::all, EvalMode::report).passed)
          << w << "x" << h;
    }
  }
}

TEST(Selector, MatchesEvaluateAllOracleOnRandomStacks) {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int fallbacks = 0;
  for (int s = 0; s < 40; ++s) {
    const ResponsiveSpec spec = vstest::random_geo_spec(rng);
    auto data = std::make_shared<const Dataset>(vstest::synthetic_geo(rng, 12 + rng() % 30));
    const Engine e(spec, data);
    for (int k = 0; k < 50; ++k) {
      const Viewport v(std::exp(u(rng) * std::log(1600.0)), std::exp(u(rng) * std::log(1000.0)));
      const auto oracle = vstest::oracle_select(e, v);
      const Selection sel = e.select(v);
      ASSERT_EQ(sel.view_index, oracle.index) << serialize_spec(spec) << v.width() << "x" << v.height();
      ASSERT_EQ(sel.fallback, oracle.fallback);
      ASSERT_EQ(e.select_index(v), oracle.fallback ? e.view_count() : oracle.index);
      fallbacks += oracle.fallback;
    }
  }
  EXPECT_GT(fallbacks, 0);
}

TEST(Selector, LayoutErrorsNameTheView) {
  Network net;
  net.nodes.push_back({"a", "a"});
  ResponsiveSpec s = parse_spec(R"({"spec_version":1,"dataset":{"kind":"network","path":"n.json"},
    "views":[{"id":"m","type":"adjacency_matrix","constraints":[{"kind":"minAdjacencyMatrixLabelSize","threshold":6}]},
             {"id":"arc","type":"arc_diagram"}]})");
  const Engine e(s, std::make_shared<const Dataset>(net));
  EXPECT_EQ(e.select(Viewport(400, 400)).view_id, "m");
  EXPECT_EQ(e.select(Viewport(50, 50)).view_id, "arc");
  EXPECT_THROW(e.layout("nope", Viewport(10, 10)), std::out_of_range);
}
