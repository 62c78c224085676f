#pragma once

#include <stdexcept>
#include <string>

namespace gerrylab {

/// Raised when inputs are well-formed but violate a domain precondition
/// (infeasible k, a+b != l^2, unknown district id, ...).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Raised by the file loaders on malformed documents.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gerrylab
