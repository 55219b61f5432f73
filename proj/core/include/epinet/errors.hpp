#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace epinet {

/// Base class for all errors thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// State/input vector size does not match the network dimension.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Config document is malformed or violates a parameter invariant.
/// Carries the path of the offending field (e.g. "model.beta").
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& message)
      : Error(path.empty() ? message : path + ": " + message),
        path_(std::move(path)) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Numerical integration could not make progress (step underflow,
/// non-finite state).
class IntegrationError : public Error {
 public:
  using Error::Error;
};

}  // namespace epinet
