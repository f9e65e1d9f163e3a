#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "viewstack/constraints.hpp"
#include "viewstack/data.hpp"
#include "viewstack/spec.hpp"

namespace viewstack {

/// `report` evaluates every constraint fully; `decide` may stop early once the
/// outcome is known (measured values are then partial).
enum class EvalMode { report, decide };

enum class ConstraintSubset { all, size_monotone, aspect };

struct ViewEvaluation {
  std::string view_id;
  std::vector<ConstraintResult> results;
  bool passed = true;
};

struct Selection {
  std::string view_id;
  std::size_t view_index = 0;
  bool fallback = false;
  /// In stack order, up to and including the selected view (or every view
  /// when evaluated exhaustively).
  std::vector<ViewEvaluation> evaluations;
};

nlohmann::json to_json(const Selection& s);

/// One view bound to a dataset, with everything that does not depend on the
/// viewport precomputed.
class ViewModel {
 public:
  explicit ViewModel(ViewSpec spec) : spec_(std::move(spec)) {}
  virtual ~ViewModel() = default;

  const ViewSpec& spec() const { return spec_; }
  const std::string& id() const { return spec_.id; }

  /// Intrinsic content box for views with a natural aspect ratio.
  virtual std::optional<ContentBox> content_box() const { return std::nullopt; }

  /// Renderable geometry and metrics at a viewport.
  virtual nlohmann::json layout_json(const Viewport& v) const = 0;

  ViewEvaluation evaluate(const Viewport& v, ConstraintSubset subset = ConstraintSubset::all,
                          EvalMode mode = EvalMode::report) const;

  bool has_constraints(ConstraintSubset subset) const;

 protected:
  /// Evaluates size-dependent constraints against a single layout computation.
  virtual std::vector<ConstraintResult> evaluate_sized(const std::vector<const ConstraintSpec*>& constraints,
                                                       const Viewport& v, EvalMode mode) const = 0;

  [[noreturn]] void unsupported(const ConstraintSpec& c) const;

 private:
  ViewSpec spec_;
};

std::unique_ptr<ViewModel> make_view_model(const ViewSpec& spec, const Dataset& data,
                                           std::vector<std::string>* warnings = nullptr);

/// Content hashes identifying the inputs a result was computed from.
struct Provenance {
  std::string spec_hash;
  std::string data_hash;
  bool operator==(const Provenance&) const = default;
};

/// FNV-1a 64 hashes of the canonical JSON forms of spec and dataset.
Provenance provenance_of(const ResponsiveSpec& spec, const Dataset& data);

/// A validated spec bound to a dataset.
class Engine {
 public:
  /// Throws ValidationError when validate_spec reports errors.
  Engine(ResponsiveSpec spec, std::shared_ptr<const Dataset> data);

  const ResponsiveSpec& spec() const { return spec_; }
  const Dataset& data() const { return *data_; }
  const std::shared_ptr<const Dataset>& data_ptr() const { return data_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  const Provenance& provenance() const { return provenance_; }

  std::size_t view_count() const { return views_.size(); }
  const ViewModel& view(std::size_t i) const { return *views_.at(i); }
  std::optional<std::size_t> view_index(std::string_view id) const;

  /// First view whose constraints all pass; the last view with fallback set
  /// when none does. Layout failures surface as LayoutError naming the view.
  Selection select(const Viewport& v, bool evaluate_all = false) const;

  /// Index of the selected view, or view_count() when nothing passes.
  std::size_t select_index(const Viewport& v) const;

  /// Whether view `i` passes the given subset of its constraints.
  bool view_passes(std::size_t i, const Viewport& v, ConstraintSubset subset) const;

  /// Layout JSON for a view; throws std::out_of_range for unknown ids.
  nlohmann::json layout(std::string_view view_id, const Viewport& v) const;

 private:
  ViewEvaluation guarded_evaluate(std::size_t i, const Viewport& v, ConstraintSubset subset, EvalMode mode) const;

  ResponsiveSpec spec_;
  std::shared_ptr<const Dataset> data_;
  std::vector<std::unique_ptr<ViewModel>> views_;
  std::vector<std::string> warnings_;
  Provenance provenance_;
};

Selection select_view(const ResponsiveSpec& spec, const Dataset& data, const Viewport& v);

}  // namespace viewstack
