#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tsg {

/// Point outside a time scale, bad interval endpoints, malformed scale.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Forward difference requested at the right end of a scale.
class DerivativeUndefined : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Operation called without a required input (e.g. missing bound spec).
class PreconditionError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Configuration value rejected; `field()` names the offending key.
class ValidationError : public std::invalid_argument {
public:
  ValidationError(std::string field, const std::string& what)
      : std::invalid_argument(what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& what)
      : std::runtime_error(what), offset_(offset), expected_(std::move(expected)) {}

  /// Byte offset into the source text.
  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

/// Expression evaluation produced a non-finite value or hit a domain violation.
class EvalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace tsg
