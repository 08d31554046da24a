#include "indoornav/tuning.hpp"

#include <cmath>
#include <cstdio>
#include <future>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <algorithm>

namespace indoornav {

double ClearanceModel::arc_length() const {
  if (!(R > 0.0)) throw std::invalid_argument("clearance model radius must be positive");
  switch (extent) {
    case PlanExtent::kQuarter: return std::numbers::pi * R / 2.0;
    case PlanExtent::kSemi: return std::numbers::pi * R;
    case PlanExtent::kFull: return 2.0 * std::numbers::pi * R;
  }
  return std::numbers::pi * R;
}

double model_clearance(double d, const ClearanceModel& model) {
  const double arc = model.arc_length();
  if (!(d >= 0.0 && d <= arc * (1.0 + 1e-12))) {
    throw std::invalid_argument("progression outside the plan extent");
  }
  return std::max(0.0, model.R * std::cos(d / (2.0 * model.R)));
}

namespace {

SweepRow minimize(const CostParams& p, double lambda, double B, const ClearanceModel& model) {
  const double arc = model.arc_length();
  const auto steps = static_cast<long>(std::ceil(arc / 1e-3));
  SweepRow row{lambda, B, model.R, 0.0, 0.0, std::numeric_limits<double>::infinity()};
  for (long k = 0; k <= steps; ++k) {
    const double d = arc * double(k) / double(steps);
    const double c = model_clearance(d, model);
    const double J = p.A * std::exp(-p.gamma * c) + B * std::exp(-lambda * d);
    if (J < row.J_star) {
      row.J_star = J;
      row.d_star = d;
      row.c_star = c;
    }
  }
  return row;
}

}  // namespace

std::vector<SweepRow> sweep(const CostParams& base, std::span<const double> lambdas,
                            std::span<const double> Bs, const ClearanceModel& model) {
  if (lambdas.empty() || Bs.empty()) throw std::invalid_argument("sweep grids must be non-empty");
  model.arc_length();  // validates R

  // Workers fill disjoint slots of a preallocated table, so the output order
  // is the (lambda, B) input order whatever the scheduling.
  std::vector<SweepRow> out(lambdas.size() * Bs.size());
  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, out.size());
  std::vector<std::future<void>> tasks;
  for (std::size_t w = 0; w < workers; ++w) {
    tasks.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < out.size(); i += workers) {
        out[i] = minimize(base, lambdas[i / Bs.size()], Bs[i % Bs.size()], model);
      }
    }));
  }
  for (auto& t : tasks) t.get();
  return out;
}

namespace {

double parse_number(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + text + "'");
  }
  if (used != text.size()) throw std::invalid_argument("not a number: '" + text + "'");
  return v;
}

}  // namespace

std::vector<double> parse_range(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
  if (parts.size() != 3) throw std::invalid_argument("range must be start:stop:step");
  const double start = parse_number(parts[0]);
  const double stop = parse_number(parts[1]);
  const double step = parse_number(parts[2]);
  if (!(step > 0.0)) throw std::invalid_argument("range step must be positive");
  if (stop < start) throw std::invalid_argument("range stop precedes start");
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((stop - start) / step + 0.5));
  for (long k = 0; k <= n; ++k) out.push_back(start + double(k) * step);
  return out;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ',');) out.push_back(parse_number(part));
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "lambda,B,R,d_star,c_star,J_star\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.6g,%.6g,%.6g,%.6f,%.6f,%.6f\n", r.lambda, r.B, r.R, r.d_star,
                  r.c_star, r.J_star);
    out << buf;
  }
}

}  // namespace indoornav
