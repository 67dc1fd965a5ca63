#pragma once

#include <stdexcept>
#include <string>

namespace cmosb {

// Raised when a caller passes arguments outside an operation's domain.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed or inconsistent input files (CSV, serialized forests, logs).
class IngestionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Ciphertext presented to a key it was not produced under.
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fixed-point encoding overflow.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class MetricError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace cmosb
