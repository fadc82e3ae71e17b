#include "churnkit/hazard.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "churnkit/numerics.hpp"

namespace churnkit {

double kernel_value(KernelKind kind, double u) {
  switch (kind) {
    case KernelKind::Uniform:
      return std::fabs(u) <= 1.0 ? 0.5 : 0.0;
    case KernelKind::Epanechnikov:
      return std::fabs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
    case KernelKind::Gaussian:
      return std_normal_pdf(u);
  }
  return 0.0;
}

HazardCurve kernel_hazard(const std::vector<EventTableRow>& table, const KernelSpec& spec,
                          const std::vector<double>& grid) {
  if (!(spec.bandwidth > 0.0)) {
    throw InvalidInputError("kernel_hazard: bandwidth must be > 0, got " +
                            std::to_string(spec.bandwidth));
  }
  if (grid.empty()) {
    throw InvalidInputError("kernel_hazard: grid must be non-empty");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw InvalidInputError("kernel_hazard: grid must be strictly ascending");
    }
  }

  const double b = spec.bandwidth;
  HazardCurve curve;
  curve.grid = grid;
  curve.values.resize(grid.size(), 0.0);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double t = grid[g];
    double sum = 0.0;
    for (const EventTableRow& row : table) {
      const double increment = static_cast<double>(row.events) / row.at_risk;
      double k = kernel_value(spec.kind, (t - row.time) / b);
      if (spec.boundary == BoundaryCorrection::Reflect) {
        k += kernel_value(spec.kind, (t + row.time) / b);
      }
      sum += k * increment;
    }
    curve.values[g] = sum / b;
  }
  return curve;
}

double default_bandwidth(const std::vector<EventTableRow>& table) {
  if (table.size() < 2) return 1.0;
  const double span = table.back().time - table.front().time;
  return span > 0.0 ? span / 8.0 : 1.0;
}

std::vector<double> default_grid(const std::vector<EventTableRow>& table, int points) {
  if (points < 1) {
    throw InvalidInputError("default_grid: points must be >= 1");
  }
  const double t_max = table.empty() ? 0.0 : table.back().time;
  std::vector<double> grid;
  if (t_max <= 0.0 || points == 1) {
    grid.push_back(0.0);
    return grid;
  }
  grid.reserve(points);
  for (int i = 0; i < points; ++i) {
    grid.push_back(t_max * i / (points - 1));
  }
  return grid;
}

PiecewiseRates piecewise_exponential(const Cohort& cohort, double bin_width) {
  if (!(bin_width > 0.0)) {
    throw InvalidInputError("piecewise_exponential: bin_width must be > 0, got " +
                            std::to_string(bin_width));
  }
  PiecewiseRates rates;
  rates.bin_width = bin_width;

  double max_t = 0.0;
  for (const Observation& obs : cohort.observations) {
    if (!(obs.duration_hours >= 0.0) || !std::isfinite(obs.duration_hours)) {
      throw InvalidInputError("piecewise_exponential: duration must be finite and >= 0");
    }
    max_t = std::max(max_t, obs.duration_hours);
  }
  if (cohort.observations.empty()) return rates;

  auto bin_of = [bin_width](double t) {
    // Boundary times belong to the later bin even when t/w rounds down.
    long long k = static_cast<long long>(std::floor(t / bin_width));
    if (t >= (k + 1) * bin_width) ++k;
    if (t < k * bin_width) --k;
    return static_cast<std::size_t>(std::max(k, 0LL));
  };

  const std::size_t n_bins = bin_of(max_t) + 1;
  rates.bins.resize(n_bins);
  for (const Observation& obs : cohort.observations) {
    const double t = obs.duration_hours;
    if (!obs.censored) {
      ++rates.bins[bin_of(t)].events;
    }
    for (std::size_t k = 0; k < n_bins; ++k) {
      const double in_bin = std::clamp(t - static_cast<double>(k) * bin_width, 0.0, bin_width);
      if (in_bin <= 0.0) break;
      rates.bins[k].exposure += in_bin;
    }
  }
  for (PiecewiseRates::Bin& bin : rates.bins) {
    if (bin.exposure > 0.0) {
      bin.rate = bin.events / bin.exposure;
    }
  }
  return rates;
}

}  // namespace churnkit
