#pragma once

#include <stdexcept>
#include <string>

namespace funscene {

// Base for every error the engine raises. `kind()` is a short stable tag that
// the CLI and the run log use to classify failures.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

struct InvalidArgument : Error {
  explicit InvalidArgument(const std::string& what) : Error("invalid-argument", what) {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& what) : Error("parse", what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error("io", what) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error("config", what) {}
};

}  // namespace funscene
