#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace noether {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text; offset is a 0-based byte index into the source.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

class UnboundVariable : public Error {
public:
  explicit UnboundVariable(const std::string& name)
      : Error("unbound variable '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

private:
  std::string name_;
};

/// Evaluation left the domain of an operation (ln of a non-positive value,
/// division by zero, ...). `subexpression` is the printed offending node.
class DomainError : public Error {
public:
  DomainError(const std::string& reason, const std::string& subexpression)
      : Error(reason + " in '" + subexpression + "'"), subexpression_(subexpression) {}
  const std::string& subexpression() const noexcept { return subexpression_; }

private:
  std::string subexpression_;
};

/// Invalid problem, group, multiplier or configuration data.
class ModelError : public Error {
public:
  using Error::Error;
};

}  // namespace noether
