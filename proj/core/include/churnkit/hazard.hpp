#ifndef CHURNKIT_HAZARD_HPP
#define CHURNKIT_HAZARD_HPP

#include <optional>
#include <vector>

#include "churnkit/types.hpp"

namespace churnkit {

enum class KernelKind { Uniform, Epanechnikov, Gaussian };

/// How to treat kernel mass that would spill below t = 0.
enum class BoundaryCorrection {
  None,     // plain sum, mass below zero is lost
  Reflect,  // fold it back: add K((t + t_i)/b) to each term
};

struct KernelSpec {
  KernelKind kind = KernelKind::Epanechnikov;
  double bandwidth = 1.0;  // hours, > 0
  BoundaryCorrection boundary = BoundaryCorrection::Reflect;
};

/// Kernel value K(u): Uniform 1/2 on [-1,1], Epanechnikov 3/4 (1-u^2) on
/// [-1,1], Gaussian standard normal density.
double kernel_value(KernelKind kind, double u);

struct HazardCurve {
  std::vector<double> grid;    // strictly ascending times
  std::vector<double> values;  // churns per hour, >= 0
};

/// Smooths the Nelson-Aalen increments: h(t) = (1/b) sum K((t-t_i)/b) d_i/n_i,
/// with the left-boundary treatment chosen in the spec.
HazardCurve kernel_hazard(const std::vector<EventTableRow>& table, const KernelSpec& spec,
                          const std::vector<double>& grid);

/// (t_max - t_min) / 8 over the event times; 1.0 when degenerate.
double default_bandwidth(const std::vector<EventTableRow>& table);

/// 256 evenly spaced points from 0 to the largest event time.
std::vector<double> default_grid(const std::vector<EventTableRow>& table, int points = 256);

/// Constant-hazard rates over fixed-width bins [k*w, (k+1)*w); an event
/// exactly on a boundary belongs to the later bin.
struct PiecewiseRates {
  struct Bin {
    int events = 0;
    double exposure = 0.0;             // total time spent inside the bin
    std::optional<double> rate;        // events/exposure; absent when exposure is 0
  };
  double bin_width = 1.0;
  std::vector<Bin> bins;
};

PiecewiseRates piecewise_exponential(const Cohort& cohort, double bin_width);

}  // namespace churnkit

#endif  // CHURNKIT_HAZARD_HPP
