#include <gtest/gtest.h>
#include <httplib.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "support.hpp"
#include "viewstack/cli.hpp"
#include "viewstack/json_format.hpp"
#include "viewstack/service.hpp"

using namespace viewstack;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::unique_ptr<Service> population_service() {
  ResponsiveSpec spec = vstest::load_spec("population_world");
  auto data = std::make_shared<const Dataset>(load_dataset(spec.dataset, vstest::data_path("specs")));
  return std::make_unique<Service>(std::move(spec), std::move(data), vstest::data_path("specs"));
}

HttpResponse get(Service& s, const std::string& path, std::map<std::string, std::string> q = {}) {
  return s.handle("GET", path, q, "");
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
}

}  // namespace

TEST(Service, SelectMatchesEngine) {
  auto s = population_service();
  const auto r = get(*s, "/api/select", {{"w", "1200"}, {"h", "700"}});
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.content_type, "application/json");
  const auto j = json::parse(r.body);
  EXPECT_EQ(j.at("view"), "circle_map");
  EXPECT_EQ(j.at("fallback"), false);
  EXPECT_EQ(r.body, canonical_dump(to_json(s->snapshot()->engine->select(Viewport(1200, 700)))) + "\n");
  const auto all = json::parse(get(*s, "/api/select", {{"w", "1200"}, {"h", "700"}, {"all", "1"}}).body);
  EXPECT_EQ(all.at("evaluated").size(), 4u);
}

TEST(Service, BadRequests) {
  auto s = population_service();
  EXPECT_EQ(get(*s, "/api/select", {{"w", "10"}}).status, 400);
  EXPECT_EQ(get(*s, "/api/select", {{"w", "-1"}, {"h", "5"}}).status, 400);
  EXPECT_EQ(get(*s, "/api/select", {{"w", "abc"}, {"h", "5"}}).status, 400);
  EXPECT_EQ(get(*s, "/api/nothing").status, 404);
  EXPECT_EQ(s->handle("DELETE", "/api/select", {}, "").status, 405);
  EXPECT_EQ(get(*s, "/api/views/nope/layout", {{"w", "10"}, {"h", "10"}}).status, 404);
  EXPECT_EQ(get(*s, "/api/landscape", {{"mode", "quick"}}).status, 400);
  EXPECT_EQ(get(*s, "/api/landscape", {{"step", "40"}, {"format", "gif"}}).status, 400);
  const auto err = json::parse(get(*s, "/api/select", {{"w", "10"}}).body);
  EXPECT_TRUE(err.contains("error"));
}

TEST(Service, LayoutEndpoint) {
  auto s = population_service();
  const auto r = get(*s, "/api/views/dorling/layout", {{"w", "800"}, {"h", "400"}});
  ASSERT_EQ(r.status, 200);
  const auto j = json::parse(r.body);
  EXPECT_EQ(j.at("view"), "dorling");
  EXPECT_EQ(j.at("circles").size(), 235u);
  EXPECT_TRUE(j.at("metrics").at("converged").get<bool>());
}

TEST(Service, LandscapeEndpoint) {
  auto s = population_service();
  const auto r = get(*s, "/api/landscape", {{"step", "40"}});
  ASSERT_EQ(r.status, 200);
  const auto j = json::parse(r.body);
  const auto& engine = *s->snapshot()->engine;
  EXPECT_EQ(j.at("provenance").at("spec_hash"), engine.provenance().spec_hash);
  EXPECT_EQ(j.at("provenance").at("data_hash"), engine.provenance().data_hash);
  LandscapeRegion region = engine.spec().landscape;
  region.step = 40;
  EXPECT_EQ(r.body, canonical_dump(to_json(compute_landscape(engine, region))) + "\n");

  const auto png = get(*s, "/api/landscape", {{"step", "40"}, {"format", "png"}, {"w", "800"}, {"h", "500"}});
  EXPECT_EQ(png.status, 200);
  EXPECT_EQ(png.content_type, "image/png");
  const auto svg = get(*s, "/api/landscape", {{"step", "40"}, {"format", "svg"}});
  EXPECT_EQ(svg.content_type, "image/svg+xml");
}

TEST(Service, MetaAndSpec) {
  auto s = population_service();
  const auto meta = json::parse(get(*s, "/api/meta").body);
  EXPECT_EQ(meta.at("generation"), 1);
  EXPECT_EQ(meta.at("views").size(), 4u);
  EXPECT_EQ(meta.at("dataset").at("kind"), "geo");
  EXPECT_EQ(meta.at("dataset").at("size"), 235);
  const auto spec = get(*s, "/api/spec");
  EXPECT_EQ(parse_spec(spec.body), s->snapshot()->engine->spec());
}

TEST(Service, PostSpec) {
  auto s = population_service();
  const auto bad_json = s->handle("POST", "/api/spec", {}, "{\"views\": [");
  EXPECT_EQ(bad_json.status, 422);
  EXPECT_TRUE(json::parse(bad_json.body).contains("offset"));

  ResponsiveSpec spec = vstest::load_spec("population_world");
  std::get<CircleMapParams>(spec.views[0].params).value_field = "gdp";
  const auto bad_field = s->handle("POST", "/api/spec", {}, serialize_spec(spec));
  EXPECT_EQ(bad_field.status, 422);
  EXPECT_EQ(json::parse(bad_field.body).at("diagnostics").at(0).at("view"), "circle_map");
  EXPECT_EQ(s->generation(), 1u);

  spec = vstest::load_spec("population_world");
  spec.views[0].constraints[0].threshold = 40;
  const auto ok = s->handle("POST", "/api/spec", {}, serialize_spec(spec));
  ASSERT_EQ(ok.status, 200) << ok.body;
  EXPECT_EQ(json::parse(ok.body).at("generation"), 2);
  EXPECT_EQ(json::parse(get(*s, "/api/select", {{"w", "1200"}, {"h", "700"}}).body).at("view"), "dorling");

  // A spec naming another dataset loads it relative to the base directory.
  const auto other = s->handle("POST", "/api/spec", {}, read_file(vstest::spec_path("population_americas")));
  ASSERT_EQ(other.status, 200) << other.body;
  EXPECT_EQ(json::parse(other.body).at("generation"), 3);
  EXPECT_EQ(json::parse(get(*s, "/api/meta").body).at("dataset").at("size"),
            std::get<GeoFeatureCollection>(s->snapshot()->engine->data()).features.size());
}

TEST(Service, HttpRoundTripMatchesCli) {
  auto s = population_service();
  const int port = s->bind("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  std::thread server([&] { s->run(); });
  httplib::Client client("127.0.0.1", port);
  client.set_connection_timeout(5);
  httplib::Result r;
  for (int attempt = 0; attempt < 50 && !r; ++attempt) {
    r = client.Get("/api/select?w=800&h=600");
    if (!r) std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);

  std::ostringstream out, err;
  ASSERT_EQ(run_cli({"viewstack", "evaluate", "--spec", vstest::spec_path("population_world"), "-W", "800", "-H", "600",
                     "--json"},
                    out, err),
            kExitOk)
      << err.str();
  EXPECT_EQ(r->body, out.str());

  auto missing = client.Get("/api/select?w=800");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 400);
  auto posted = client.Post("/api/spec", "{", "application/json");
  ASSERT_TRUE(posted);
  EXPECT_EQ(posted->status, 422);

  s->stop();
  server.join();
}

TEST(Service, ReloadsWhenFilesChange) {
  const fs::path dir = fs::temp_directory_path() / ("viewstack_reload_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  fs::copy_file(vstest::data_path("miserables.json"), dir / "miserables.json", fs::copy_options::overwrite_existing);
  ResponsiveSpec spec = vstest::load_spec("miserables");
  spec.dataset.path = "miserables.json";
  write_text(dir / "spec.json", serialize_spec(spec));

  ServiceConfig config;
  config.spec_path = (dir / "spec.json").string();
  Service s(config);
  EXPECT_EQ(s.generation(), 1u);
  EXPECT_FALSE(s.reload_if_changed());

  spec.views[0].constraints[0].threshold = 9;
  write_text(dir / "spec.json", serialize_spec(spec));
  fs::last_write_time(dir / "spec.json", fs::last_write_time(dir / "spec.json") + std::chrono::seconds(5));
  EXPECT_TRUE(s.reload_if_changed());
  EXPECT_EQ(s.generation(), 2u);
  EXPECT_EQ(s.snapshot()->engine->spec().views[0].constraints[0].threshold, 9.0);

  // A broken edit keeps serving the last good snapshot.
  write_text(dir / "spec.json", "{ not json");
  fs::last_write_time(dir / "spec.json", fs::last_write_time(dir / "spec.json") + std::chrono::seconds(10));
  EXPECT_FALSE(s.reload_if_changed());
  EXPECT_EQ(s.generation(), 2u);
  EXPECT_FALSE(s.last_reload_error().empty());
  EXPECT_EQ(json::parse(s.handle("GET", "/api/meta", {}, "").body).at("reload_error"), s.last_reload_error());

  // Touching the dataset also triggers a reload.
  write_text(dir / "spec.json", serialize_spec(spec));
  fs::last_write_time(dir / "spec.json", fs::last_write_time(dir / "spec.json") + std::chrono::seconds(15));
  EXPECT_TRUE(s.reload_if_changed());
  fs::last_write_time(dir / "miserables.json", fs::last_write_time(dir / "miserables.json") + std::chrono::seconds(20));
  EXPECT_TRUE(s.reload_if_changed());
  EXPECT_EQ(s.generation(), 4u);
  EXPECT_TRUE(s.last_reload_error().empty());
  fs::remove_all(dir);
}

TEST(Service, DefaultPortFromEnvironment) {
  ::setenv(kPortEnv, "9123", 1);
  EXPECT_EQ(default_port(), 9123);
  ::setenv(kPortEnv, "junk", 1);
  EXPECT_EQ(default_port(), kDefaultPort);
  ::unsetenv(kPortEnv);
  EXPECT_EQ(default_port(), kDefaultPort);
}
