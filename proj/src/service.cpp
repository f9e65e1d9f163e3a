#include "viewstack/service.hpp"

#include <httplib.h>

#include <cstdlib>
#include <regex>

#include "viewstack/errors.hpp"
#include "viewstack/json_format.hpp"
#include "viewstack/landscape.hpp"
#include "viewstack/render.hpp"

namespace viewstack {

using nlohmann::json;

namespace fs = std::filesystem;

int default_port() {
  if (const char* env = std::getenv(kPortEnv)) {
    const auto v = parse_number(env);
    if (v && *v >= 1 && *v <= 65535 && *v == std::floor(*v)) return static_cast<int>(*v);
  }
  return kDefaultPort;
}

namespace {

HttpResponse json_response(int status, const json& body) { return {status, "application/json", canonical_dump(body) + "\n"}; }

HttpResponse error_response(int status, const std::string& message, json extra = json::object()) {
  extra["error"] = message;
  return json_response(status, extra);
}

struct BadRequest : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double positive_param(const std::map<std::string, std::string>& query, const std::string& key) {
  auto it = query.find(key);
  if (it == query.end()) throw BadRequest("missing query parameter '" + key + "'");
  const auto v = parse_number(it->second);
  if (!v || *v <= 0.0) throw BadRequest("query parameter '" + key + "' must be a positive number");
  return *v;
}

json diagnostics_json(const std::vector<Diagnostic>& ds) {
  json out = json::array();
  for (const auto& d : ds) {
    out.push_back({{"severity", d.severity == Severity::error ? "error" : "warning"},
                   {"view", d.view_id},
                   {"message", d.message}});
  }
  return out;
}

std::size_t dataset_size(const Dataset& d) {
  return std::visit(
      [](const auto& x) -> std::size_t {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, GeoFeatureCollection>) return x.features.size();
        else if constexpr (std::is_same_v<T, Network>) return x.nodes.size();
        else return x.row_count();
      },
      d);
}

std::string resolve(const std::string& base_dir, const std::string& p) {
  fs::path path(p);
  if (path.is_relative() && !base_dir.empty()) path = fs::path(base_dir) / path;
  return path.string();
}

}  // namespace

Service::Service(ServiceConfig config) : config_(std::move(config)) {
  base_dir_ = fs::path(config_.spec_path).parent_path().string();
  install(load_from_disk());
  times_ = watched_times();
}

Service::Service(ResponsiveSpec spec, std::shared_ptr<const Dataset> data, std::string base_dir)
    : base_dir_(std::move(base_dir)) {
  install(std::make_shared<const Engine>(std::move(spec), std::move(data)));
}

Service::~Service() { stop(); }

std::shared_ptr<const Engine> Service::load_from_disk() const {
  ResponsiveSpec spec = parse_spec(read_file(config_.spec_path));
  auto data = std::make_shared<const Dataset>(load_dataset(spec.dataset, base_dir_, config_.data_path));
  return std::make_shared<const Engine>(std::move(spec), std::move(data));
}

void Service::install(std::shared_ptr<const Engine> engine) {
  std::lock_guard lock(mutex_);
  const std::uint64_t gen = snapshot_ ? snapshot_->generation + 1 : 1;
  snapshot_ = std::make_shared<const Snapshot>(Snapshot{std::move(engine), gen});
}

std::shared_ptr<const Snapshot> Service::snapshot() const {
  std::lock_guard lock(mutex_);
  return snapshot_;
}

std::map<std::string, fs::file_time_type> Service::watched_times() const {
  std::map<std::string, fs::file_time_type> out;
  auto stamp = [&](const std::string& path) {
    std::error_code ec;
    const auto t = fs::last_write_time(path, ec);
    out[path] = ec ? fs::file_time_type::min() : t;
  };
  if (config_.spec_path.empty()) return out;
  stamp(config_.spec_path);
  // The dataset named by the spec on disk, which may have just changed.
  try {
    const ResponsiveSpec spec = parse_spec(read_file(config_.spec_path));
    if (!config_.data_path.empty()) stamp(config_.data_path);
    else if (!spec.dataset.path.empty()) stamp(resolve(base_dir_, spec.dataset.path));
    if (!spec.dataset.hex_sidecar.empty()) stamp(resolve(base_dir_, spec.dataset.hex_sidecar));
  } catch (const std::exception&) {
    if (!config_.data_path.empty()) stamp(config_.data_path);
  }
  return out;
}

bool Service::reload_if_changed() {
  if (config_.spec_path.empty()) return false;
  auto now = watched_times();
  {
    std::lock_guard lock(mutex_);
    if (now == times_) return false;
    times_ = now;
  }
  try {
    install(load_from_disk());
    std::lock_guard lock(mutex_);
    reload_error_.clear();
    return true;
  } catch (const std::exception& e) {
    std::lock_guard lock(mutex_);
    reload_error_ = e.what();
    return false;
  }
}

std::string Service::last_reload_error() const {
  std::lock_guard lock(mutex_);
  return reload_error_;
}

HttpResponse Service::post_spec(const std::string& body) {
  ResponsiveSpec spec;
  try {
    spec = parse_spec(body);
  } catch (const ParseError& e) {
    json extra{{"diagnostics", json::array({{{"severity", "error"}, {"view", ""}, {"message", e.what()}}})}};
    if (e.offset() != ParseError::npos) extra["offset"] = e.offset();
    return error_response(422, e.what(), extra);
  } catch (const ValidationError& e) {
    return error_response(422, e.what(),
                          {{"diagnostics", json::array({{{"severity", "error"}, {"view", ""}, {"message", e.what()}}})}});
  }
  const auto current = snapshot();
  std::shared_ptr<const Dataset> data = current->engine->data_ptr();
  if (!(spec.dataset == current->engine->spec().dataset)) {
    try {
      data = std::make_shared<const Dataset>(load_dataset(spec.dataset, base_dir_));
    } catch (const IoError& e) {
      return error_response(422, e.what());
    } catch (const Error& e) {
      return error_response(422, e.what());
    }
  }
  const auto diagnostics = validate_spec(spec, *data);
  if (has_errors(diagnostics)) {
    return error_response(422, "spec does not fit the dataset", {{"diagnostics", diagnostics_json(diagnostics)}});
  }
  try {
    install(std::make_shared<const Engine>(std::move(spec), std::move(data)));
  } catch (const Error& e) {
    return error_response(422, e.what());
  }
  return json_response(200, {{"generation", generation()}});
}

HttpResponse Service::handle(const std::string& method, const std::string& path,
                             const std::map<std::string, std::string>& query, const std::string& body) {
  static const std::regex layout_path(R"(^/api/views/([^/]+)/layout$)");
  try {
    if (path == "/api/spec" && method == "POST") return post_spec(body);
    if (method != "GET") return error_response(405, "method not allowed");

    const auto snap = snapshot();
    const Engine& engine = *snap->engine;
    std::smatch m;
    if (path == "/api/select") {
      const Viewport v(positive_param(query, "w"), positive_param(query, "h"));
      const bool all = query.count("all") && query.at("all") != "0" && query.at("all") != "false";
      return json_response(200, to_json(engine.select(v, all)));
    }
    if (std::regex_match(path, m, layout_path)) {
      const Viewport v(positive_param(query, "w"), positive_param(query, "h"));
      if (!engine.view_index(m[1].str())) return error_response(404, "unknown view '" + m[1].str() + "'");
      return json_response(200, engine.layout(m[1].str(), v));
    }
    if (path == "/api/landscape") {
      LandscapeRegion region = engine.spec().landscape;
      if (query.count("step")) region.step = positive_param(query, "step");
      LandscapeOptions opts;
      if (query.count("mode")) {
        const auto mode = landscape_mode_from_string(query.at("mode"));
        if (!mode) return error_response(400, "mode must be 'fast' or 'full'");
        opts.mode = *mode;
      }
      const ViewLandscape l = compute_landscape(engine, region, opts);
      const std::string format = query.count("format") ? query.at("format") : "json";
      if (format == "json") return json_response(200, to_json(l));
      const auto image = image_format_from_string(format);
      if (!image) return error_response(400, "format must be json, png or svg");
      RenderOptions ro;
      if (query.count("w") && query.count("h")) {
        ro.marker = Point{positive_param(query, "w"), positive_param(query, "h")};
      }
      return {200, *image == ImageFormat::png ? "image/png" : "image/svg+xml", render_landscape(l, *image, ro)};
    }
    if (path == "/api/spec") return json_response(200, to_json(engine.spec()));
    if (path == "/api/meta") {
      json views = json::array();
      for (const auto& v : engine.spec().views) views.push_back({{"id", v.id}, {"type", to_string(v.type())}});
      const auto& r = engine.spec().landscape;
      const auto& prov = engine.provenance();
      return json_response(
          200, {{"generation", snap->generation},
                {"name", engine.spec().name},
                {"views", views},
                {"dataset", {{"kind", to_string(kind_of(engine.data()))}, {"size", dataset_size(engine.data())}}},
                {"landscape", {{"width", {r.w_min, r.w_max}}, {"height", {r.h_min, r.h_max}}, {"step", r.step}}},
                {"provenance", {{"spec_hash", prov.spec_hash}, {"data_hash", prov.data_hash}}},
                {"warnings", engine.warnings()},
                {"reload_error", last_reload_error()}});
    }
    return error_response(404, "no such endpoint: " + path);
  } catch (const BadRequest& e) {
    return error_response(400, e.what());
  } catch (const std::invalid_argument& e) {
    return error_response(400, e.what());
  } catch (const ValidationError& e) {
    return error_response(400, e.what());
  } catch (const LayoutError& e) {
    return error_response(500, e.what(), {{"view", e.view_id()}});
  } catch (const std::exception& e) {
    return error_response(500, e.what());
  }
}

int Service::bind(const std::string& host, int port) {
  server_ = std::make_unique<httplib::Server>();
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> query;
    for (const auto& [k, v] : req.params) query.emplace(k, v);
    const HttpResponse r = handle(req.method, req.path, query, req.body);
    res.status = r.status;
    res.set_content(r.body, r.content_type.c_str());
  };
  server_->Get(R"(/.*)", route);
  server_->Post(R"(/.*)", route);
  server_->Put(R"(/.*)", route);
  server_->Delete(R"(/.*)", route);
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

void Service::run() {
  if (!server_) throw std::logic_error("Service::run called before bind");
  stopping_ = false;
  if (config_.watch && !watcher_.joinable()) {
    watcher_ = std::thread([this] {
      while (!stopping_) {
        const auto until = std::chrono::steady_clock::now() + config_.poll_interval;
        while (!stopping_ && std::chrono::steady_clock::now() < until) {
          std::this_thread::sleep_for(std::chrono::milliseconds(20));
        }
        if (!stopping_) reload_if_changed();
      }
    });
  }
  server_->listen_after_bind();
}

void Service::stop() {
  stopping_ = true;
  if (server_) server_->stop();
  if (watcher_.joinable()) watcher_.join();
}

}  // namespace viewstack
