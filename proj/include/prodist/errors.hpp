#pragma once

#include <stdexcept>
#include <string>

namespace prodist {

// Thrown when a requested moment does not exist (tail index too small).
class divergent_moment_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when a tail estimator cannot produce a finite value
// (e.g. all order statistics in the window coincide).
class degenerate_tail_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when a fit or analysis is asked to run on too few observations.
class insufficient_data_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when a demand value has no equilibrium inverse temperature
// (at or above the zero-temperature mean, or below the attainable range).
class demand_out_of_range_error : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Thrown by index-transfer maps outside their theoretical domain (mu <= 1).
class out_of_theory_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Thrown when a weight or law cannot be normalized (gamma >= 1, delta >= 1).
class normalizability_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Thrown on file-level input problems (bad header, unreadable file).
class schema_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when an iterative numerical routine fails to reach its tolerance;
// the message carries diagnostics (last estimate, achieved error).
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when a file cannot be written; the message carries the path.
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace prodist
