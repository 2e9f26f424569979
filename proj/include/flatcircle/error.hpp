#pragma once

#include <stdexcept>
#include <string>

namespace flatcircle {

enum class ErrorKind {
  domain,              // argument outside the mathematical domain
  config,              // malformed configuration or input text
  precision,           // working precision exhausted; more bits needed
  inconsistency,       // an asserted invariant was violated
  io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error(ErrorKind::domain, w) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorKind::config, w) {}
};
struct PrecisionExhausted : Error {
  explicit PrecisionExhausted(const std::string& w)
      : Error(ErrorKind::precision, w + "; rerun with more bits") {}
};
struct InconsistencyError : Error {
  explicit InconsistencyError(const std::string& w) : Error(ErrorKind::inconsistency, w) {}
};
struct IoError : Error {
  explicit IoError(const std::string& w) : Error(ErrorKind::io, w) {}
};

}  // namespace flatcircle
