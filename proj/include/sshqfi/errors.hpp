#pragma once

#include <stdexcept>
#include <string>

namespace sshqfi {

/// A model or algorithm parameter violates its stated invariant.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An analytic formula was evaluated outside its domain (e.g. outside the gap).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A requested time range is not covered by the sampled grid.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Dense diagonalization refused because the matrix is too large.
class DimensionGuard : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sshqfi
