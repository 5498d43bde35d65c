#pragma once

#include <stdexcept>
#include <string>

namespace swnudge {

// Base for all library errors; everything user-facing is catchable as this.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad argument or field/grid mismatch detected before any work is done.
struct InvalidArgument : Error {
  using Error::Error;
};

// Grid/field construction violating structural invariants (nx < 3, dx <= 0, ...).
struct InvalidGrid : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};

// Operation undefined for this input shape (e.g. rotate90 on a non-square grid).
struct UnsupportedTransform : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};

// Physical-state violation (h <= 0) or malformed state.
struct InvalidState : Error {
  using Error::Error;
};

// Time step rejected by the stability check and force flag not set.
struct CflViolation : Error {
  using Error::Error;
};

// Blow-up, non-finite values, or divergence detected during integration.
struct NumericalFailure : Error {
  int step = -1;
  NumericalFailure(const std::string& msg, int step_) : Error(msg), step(step_) {}
};

// A precondition of the modal analysis failed (nonpositive coefficient, ...).
struct AssumptionViolated : Error {
  int p = 0, q = 0;
  AssumptionViolated(const std::string& msg, int p_, int q_) : Error(msg), p(p_), q(q_) {}
};

// Relative-error denominator is zero: the metric is undefined for this state.
struct UndefinedMetric : Error {
  using Error::Error;
};

// Gain-tuning inputs violate the feasibility inequality of the heuristic.
struct InvalidTuning : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};

// Config file missing, unparsable, or inconsistent.
struct ConfigError : Error {
  using Error::Error;
};

// File I/O and snapshot format problems.
struct IoError : Error {
  using Error::Error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidArgument(msg);
}

}  // namespace swnudge
