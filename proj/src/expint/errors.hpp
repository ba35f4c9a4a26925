#pragma once

#include <stdexcept>
#include <string>

namespace expint {

// Argument outside the mathematical domain of a function (x <= 0 for M, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Argument inside the domain but outside what a table or the double range covers.
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

// Request exceeds a fixed resource cap (martingale depth, sample counts).
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed serialized input (tables, martingales, manifests).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace expint
