#pragma once

// Progression/obstacle tradeoff model: a global plan that follows a circle of
// radius R around a point obstacle, with the robot cutting straight chords.

#include <ostream>
#include <span>
#include <vector>

#include "indoornav/costmap.hpp"

namespace indoornav {

enum class PlanExtent { kQuarter, kSemi, kFull };

struct ClearanceModel {
  double R = 2.0;
  PlanExtent extent = PlanExtent::kSemi;

  /// Arc length of the plan. Throws std::invalid_argument unless R > 0.
  double arc_length() const;
};

/// Distance from the obstacle (circle center) to the straight chord that
/// subtends arc length d: R*cos(d / 2R), clamped at 0. Throws
/// std::invalid_argument for d outside [0, arc_length].
double model_clearance(double d, const ClearanceModel& model);

struct SweepRow {
  double lambda = 0.0;
  double B = 0.0;
  double R = 0.0;
  double d_star = 0.0;
  double c_star = 0.0;
  double J_star = 0.0;
};

/// Minimizes J(d) = A*exp(-gamma*c(d)) + B*exp(-lambda*d) over the plan
/// extent by grid search with a step of at most 1 mm of arc. Rows come out
/// lambda-major in the order of the input grids. Ties keep the smaller d.
std::vector<SweepRow> sweep(const CostParams& base, std::span<const double> lambdas,
                            std::span<const double> Bs, const ClearanceModel& model);

/// `start:stop:step`, inclusive of stop (within half a step). Throws
/// std::invalid_argument on malformed input or a non-positive step.
std::vector<double> parse_range(const std::string& text);
/// Comma-separated list of numbers.
std::vector<double> parse_list(const std::string& text);

/// CSV with header `lambda,B,R,d_star,c_star,J_star`.
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

}  // namespace indoornav
