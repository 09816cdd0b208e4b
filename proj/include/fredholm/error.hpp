#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fredholm {

/// Base of every error the library throws.  `code()` is the stable,
/// machine-readable identifier surfaced by the CLI (e.g. "E_GRAM_SINGULAR").
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

/// Syntax error in an expression; `offset()` is the byte offset into the source.
class SyntaxError : public Error {
public:
  SyntaxError(const std::string& message, std::size_t offset)
      : Error("E_EXPR_SYNTAX", message + " at offset " + std::to_string(offset)),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

class UnknownIdentifierError : public Error {
public:
  explicit UnknownIdentifierError(std::string name)
      : Error("E_EXPR_UNKNOWN_IDENT", "unknown identifier '" + name + "'"),
        name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }

private:
  std::string name_;
};

/// Evaluation left the real domain: ln/sqrt of a negative, division by zero,
/// fractional power of a negative base.  `subexpression()` names the culprit.
class DomainError : public Error {
public:
  DomainError(const std::string& message, std::string subexpression, std::string location = {})
      : Error("E_DOMAIN", message + " in '" + subexpression + "'" +
                              (location.empty() ? std::string() : " at " + location)),
        message_(message), subexpression_(std::move(subexpression)),
        location_(std::move(location)) {}

  const std::string& subexpression() const noexcept { return subexpression_; }
  const std::string& location() const noexcept { return location_; }

  DomainError at(std::string location) const { return {message_, subexpression_, std::move(location)}; }

private:
  std::string message_;
  std::string subexpression_;
  std::string location_;
};

/// A Gram matrix is too ill-conditioned to invert (numerically dependent family).
class ConditioningError : public Error {
public:
  ConditioningError(std::string code, const std::string& message, double cond)
      : Error(std::move(code), message), cond_(cond) {}

  double condition_number() const noexcept { return cond_; }

private:
  double cond_;
};

class TruncationError : public Error {
public:
  TruncationError(const std::string& message, double last_tail)
      : Error("E_TRUNCATION", message), last_tail_(last_tail) {}

  double last_tail() const noexcept { return last_tail_; }

private:
  double last_tail_;
};

/// A matrix needed to be invertible and was not (cross-matrix paths).
class SingularMatrixError : public Error {
public:
  SingularMatrixError(const std::string& what, int rank)
      : Error("E_A_SINGULAR", what + " is singular (rank " + std::to_string(rank) + ")"),
        rank_(rank) {}

  int rank() const noexcept { return rank_; }

private:
  int rank_;
};

/// Caller violated a documented precondition (sizes, ranges, mismatched domains).
class PreconditionError : public Error {
public:
  explicit PreconditionError(const std::string& message) : Error("E_PRECONDITION", message) {}
};

} // namespace fredholm
