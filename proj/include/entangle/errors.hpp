#pragma once

#include <stdexcept>

namespace entangle {

/// A numerical object failed a structural check (Hermiticity, trace, positive
/// semidefiniteness, normalization). Distinct from bad user parameters, which
/// are reported as std::invalid_argument or std::domain_error.
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace entangle
