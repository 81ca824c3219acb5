#pragma once

#include <stdexcept>
#include <string>

namespace sjhdr {

// Error taxonomy. The CLI maps these to distinct process exit codes.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad configuration: invalid parameter combinations, unknown operator kinds,
// out-of-range settings.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error("config error: " + msg) {}
};

// Input value outside an operation's mathematical domain.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& msg) : Error("domain error: " + msg) {}
};

// Tensor/image shape mismatch.
class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& msg) : Error("shape error: " + msg) {}
};

// Missing or inconsistent data (dataset variants, pipeline components).
class DataError : public Error {
 public:
  explicit DataError(const std::string& msg) : Error("data error: " + msg) {}
};

// Malformed on-disk container.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg) : Error("parse error: " + msg) {}
};

// Non-finite loss during optimization.
class DivergenceError : public Error {
 public:
  explicit DivergenceError(const std::string& msg) : Error("divergence: " + msg) {}
};

}  // namespace sjhdr
