#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace viewstack {

/// Base for every error the engine reports.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `offset` is a byte offset into the input when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset = npos)
      : Error(what), offset_(offset) {}

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Well-formed input that violates a data or spec invariant.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, std::vector<std::string> offenders = {})
      : Error(what), offenders_(std::move(offenders)) {}

  const std::vector<std::string>& offenders() const { return offenders_; }

 private:
  std::vector<std::string> offenders_;
};

/// A layout could not be computed for a view.
class LayoutError : public Error {
 public:
  LayoutError(std::string view_id, const std::string& what)
      : Error(view_id.empty() ? what : view_id + ": " + what), view_id_(std::move(view_id)) {}

  const std::string& view_id() const { return view_id_; }

 private:
  std::string view_id_;
};

/// Filesystem failures (missing or unreadable files).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace viewstack
