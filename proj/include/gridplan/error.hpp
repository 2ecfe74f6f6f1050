#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gridplan {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A file or record does not match its schema (missing column, bad number).
class SchemaError : public Error {
public:
  using Error::Error;
};

// Domain invariants violated. Carries every violation found, not only the first.
class ValidationError : public Error {
public:
  explicit ValidationError(std::vector<std::string> violations);
  explicit ValidationError(const std::string& violation)
      : ValidationError(std::vector<std::string>{violation}) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
  std::vector<std::string> violations_;
};

class SolverError : public Error {
public:
  explicit SolverError(const std::string& what, std::string raw_output = {})
      : Error(what), raw_output_(std::move(raw_output)) {}

  const std::string& raw_output() const noexcept { return raw_output_; }

private:
  std::string raw_output_;
};

class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace gridplan
