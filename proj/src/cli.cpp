#include "viewstack/cli.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <optional>

#include "viewstack/errors.hpp"
#include "viewstack/json_format.hpp"
#include "viewstack/landscape.hpp"
#include "viewstack/render.hpp"
#include "viewstack/service.hpp"

namespace viewstack {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Inputs {
  std::string spec_path;
  std::string data_path;
};

void add_inputs(CLI::App& cmd, Inputs& in) {
  cmd.add_option("--spec", in.spec_path, "Responsive spec (JSON)")->required();
  cmd.add_option("--data", in.data_path, "Dataset file, overriding the spec's dataset path");
}

Engine load_engine(const Inputs& in) {
  ResponsiveSpec spec = parse_spec(read_file(in.spec_path));
  const std::string base = fs::path(in.spec_path).parent_path().string();
  auto data = std::make_shared<const Dataset>(load_dataset(spec.dataset, base, in.data_path));
  return Engine(std::move(spec), std::move(data));
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("failed writing '" + path + "'");
}

Point parse_marker(const std::string& text) {
  const auto sep = text.find_first_of("x,");
  if (sep != std::string::npos) {
    const auto w = parse_number(text.substr(0, sep));
    const auto h = parse_number(text.substr(sep + 1));
    if (w && h && *w > 0 && *h > 0) return {*w, *h};
  }
  throw ValidationError("--marker expects WIDTHxHEIGHT, got '" + text + "'");
}

std::string format_from_path(const std::string& path) {
  const std::string ext = fs::path(path).extension().string();
  if (ext == ".png") return "png";
  if (ext == ".svg") return "svg";
  return "json";
}

int cmd_validate(const Inputs& in, std::ostream& out) {
  ResponsiveSpec spec = parse_spec(read_file(in.spec_path));
  const std::string base = fs::path(in.spec_path).parent_path().string();
  std::vector<std::string> warnings;
  const Dataset data = load_dataset(spec.dataset, base, in.data_path, &warnings);
  const auto diagnostics = validate_spec(spec, data);
  for (const auto& w : warnings) out << "warning: " << w << "\n";
  for (const auto& d : diagnostics) {
    out << (d.severity == Severity::error ? "error" : "warning") << ": ";
    if (!d.view_id.empty()) out << d.view_id << ": ";
    out << d.message << "\n";
  }
  if (has_errors(diagnostics)) return kExitInvalid;
  out << "ok: " << spec.views.size() << " views\n";
  return kExitOk;
}

void print_selection(const Selection& sel, std::ostream& out) {
  out << "selected: " << sel.view_id << (sel.fallback ? " (fallback: no view passes)" : "") << "\n";
  for (const auto& e : sel.evaluations) {
    out << "  " << e.view_id << ": " << (e.passed ? "pass" : "fail") << "\n";
    for (const auto& r : e.results) {
      out << "    " << to_string(r.kind) << " measured " << r.measured << " threshold " << r.threshold << " margin "
          << r.margin << (r.passed ? "" : "  FAIL") << "\n";
    }
  }
}

struct LandscapeArgs {
  std::string out_path;
  std::string format;
  double step = 0.0;
  std::string mode = "fast";
  std::string baseline;
  double tolerance = 0.0;
  std::string diff_out;
  unsigned threads = 0;
  std::string marker;
};

int cmd_landscape(const Inputs& in, const LandscapeArgs& a, std::ostream& out, std::ostream& err) {
  const auto mode = landscape_mode_from_string(a.mode);
  if (!mode) throw ValidationError("--mode must be fast or full");
  const std::string format = a.format.empty() ? format_from_path(a.out_path) : a.format;
  std::optional<ImageFormat> image;
  if (format != "json") {
    image = image_format_from_string(format);
    if (!image) throw ValidationError("--format must be png, svg or json");
  }

  const Engine engine = load_engine(in);
  LandscapeRegion region = engine.spec().landscape;
  if (a.step > 0) region.step = a.step;
  LandscapeOptions opts;
  opts.mode = *mode;
  opts.threads = a.threads;
  const ViewLandscape l = compute_landscape(engine, region, opts);

  if (image) {
    RenderOptions ro;
    if (!a.marker.empty()) ro.marker = parse_marker(a.marker);
    write_file(a.out_path, render_landscape(l, *image, ro));
  } else {
    write_file(a.out_path, canonical_dump(to_json(l)) + "\n");
  }
  for (const auto& e : l.errors) err << "layout error: " << e << "\n";

  const auto shares = extract_breakpoints(l).area_shares;
  out << "wrote " << a.out_path << " (" << l.cols << "x" << l.rows << " cells)\n";
  for (const auto& label : l.labels) {
    out << "  " << label << ": " << shares.at(label) * 100.0 << "%\n";
  }

  if (a.baseline.empty()) return kExitOk;
  const ViewLandscape base = landscape_from_json(json::parse(read_file(a.baseline)));
  DiffReport d;
  try {
    d = diff_landscape(base, l);
  } catch (const ValidationError& e) {
    err << "baseline " << a.baseline << " is not comparable: " << e.what() << "\n";
    return kExitDiff;
  }
  const std::string diff_path = a.diff_out.empty() ? a.out_path + ".diff.json" : a.diff_out;
  write_file(diff_path, canonical_dump(to_json(d)) + "\n");
  out << "changed " << d.changed_cells << " of " << d.total_cells << " cells (" << d.changed_fraction * 100.0
      << "%)\n";
  if (d.changed_fraction > a.tolerance) {
    err << "landscape differs from baseline beyond tolerance " << a.tolerance << "\n";
    return kExitDiff;
  }
  return kExitOk;
}

Service* g_serving = nullptr;

extern "C" void on_signal(int) {
  if (g_serving) g_serving->stop();
}

int cmd_serve(const Inputs& in, const std::string& host, int port, bool watch, std::ostream& out,
              std::ostream& err) {
  ServiceConfig config{in.spec_path, in.data_path, watch};
  Service service(config);
  const int bound = service.bind(host, port);
  if (bound < 0) {
    err << "cannot bind " << host << ":" << port << "\n";
    return kExitIo;
  }
  out << "listening on http://" << host << ":" << bound << std::endl;
  g_serving = &service;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  service.run();
  g_serving = nullptr;
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Responsive visualization breakpoint engine"};
  app.require_subcommand(1);

  Inputs in;
  auto* validate = app.add_subcommand("validate", "Check a spec against its dataset");
  add_inputs(*validate, in);

  double width = 0, height = 0;
  bool all = false;
  bool as_json = false;
  auto* evaluate = app.add_subcommand("evaluate", "Select a view for one viewport");
  add_inputs(*evaluate, in);
  evaluate->add_option("--width,-W", width, "Viewport width, px")->required()->check(CLI::PositiveNumber);
  evaluate->add_option("--height,-H", height, "Viewport height, px")->required()->check(CLI::PositiveNumber);
  evaluate->add_flag("--evaluate-all,--all", all, "Evaluate every view, not only up to the selected one");
  evaluate->add_flag("--json", as_json, "Print the selection as canonical JSON");

  LandscapeArgs la;
  auto* landscape = app.add_subcommand("landscape", "Compute the view landscape over a size region");
  add_inputs(*landscape, in);
  landscape->add_option("--out,-o", la.out_path, "Output file")->required();
  landscape->add_option("--format", la.format, "png, svg or json (default: from --out extension)");
  landscape->add_option("--step", la.step, "Grid step, px (default: from the spec)")->check(CLI::PositiveNumber);
  landscape->add_option("--mode", la.mode, "fast or full")->capture_default_str();
  landscape->add_option("--diff", la.baseline, "Baseline landscape JSON to compare against");
  landscape->add_option("--tolerance", la.tolerance, "Allowed changed-cell fraction")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  landscape->add_option("--diff-out", la.diff_out, "Diff report path (default: <out>.diff.json)");
  landscape->add_option("--threads", la.threads, "Worker threads (0: all cores)");
  landscape->add_option("--marker", la.marker, "Mark a viewport, WIDTHxHEIGHT");

  std::string host = "127.0.0.1";
  int port = default_port();
  bool watch = false;
  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  add_inputs(*serve, in);
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->check(CLI::Range(0, 65535))->capture_default_str();
  serve->add_flag("--watch", watch, "Reload when the spec or dataset changes");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*validate) return cmd_validate(in, out);
    if (*evaluate) {
      const Engine engine = load_engine(in);
      const Selection sel = engine.select(Viewport(width, height), all);
      if (as_json) out << canonical_dump(to_json(sel)) << "\n";
      else print_selection(sel, out);
      return kExitOk;
    }
    if (*landscape) return cmd_landscape(in, la, out, err);
    if (*serve) return cmd_serve(in, host, port, watch, out, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ParseError& e) {
    err << "error: " << e.what();
    if (e.offset() != ParseError::npos) err << " (at byte " << e.offset() << ")";
    err << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}

}  // namespace viewstack
