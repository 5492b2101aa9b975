#pragma once

#include <stdexcept>
#include <string>

namespace bannerforge {

/// Malformed or inconsistent input data. `where()` names the file and/or
/// field path that caused it, e.g. "persons[2][1]".
class DataError : public std::runtime_error {
 public:
  DataError(std::string where, const std::string& what)
      : std::runtime_error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}

  [[nodiscard]] const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

/// A configuration that cannot be satisfied (bad bounds, bad hyperparameters).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bannerforge
