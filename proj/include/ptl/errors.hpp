#pragma once

#include <stdexcept>
#include <string>

namespace ptl {

// Invalid argument or parameter outside an operation's domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Requested size exceeds an enumeration or pair budget.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Quadrature schemes disagree, or a computed constant left its admissible range.
class NumericalInstability : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rejection sampler exhausted its attempt budget.
class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Threshold simulation ran past its step budget without emptying.
class RunawayError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Too few samples for an empirical summary.
class SampleSizeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace ptl
