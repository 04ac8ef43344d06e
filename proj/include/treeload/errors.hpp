#pragma once

#include <stdexcept>

namespace treeload {

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct BoundError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

// Raised when conditioning on an event of probability zero.
struct ConditioningError : std::domain_error {
  using std::domain_error::domain_error;
};

struct DivergenceError : std::domain_error {
  using std::domain_error::domain_error;
};

// Cancellation could not be resolved, or a probability left [0,1].
struct NumericIntegrityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MalformedTreeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct MixedParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct EmptyConditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace treeload
