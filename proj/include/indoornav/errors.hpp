#pragma once

#include <stdexcept>
#include <string>

namespace indoornav {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A query point or ray origin lies outside the grid it was asked about.
class OutOfGrid : public Error {
 public:
  using Error::Error;
};

/// measure_gauge could not find an occupancy boundary near an endpoint.
class MeasurementFailed : public Error {
 public:
  using Error::Error;
};

class PlanningError : public Error {
 public:
  enum class Kind { kGoalUnreachable, kNoPath, kEmptyPlan };

  PlanningError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Every corridor sample is infeasible and there is no usable setpoint to keep.
class PlannerStuck : public Error {
 public:
  using Error::Error;
};

/// Scenario JSON failed schema or semantic validation. field() names the offender.
class ScenarioError : public Error {
 public:
  ScenarioError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace indoornav
