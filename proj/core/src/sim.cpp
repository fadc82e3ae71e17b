#include "churnkit/sim.hpp"

#include <cmath>
#include <random>
#include <string>

#include "churnkit/numerics.hpp"

namespace churnkit {

double inverse_survival(const Family& family, double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw InvalidInputError("inverse_survival: u must be in (0,1), got " + std::to_string(u));
  }
  const double lambda = family.params[0];
  switch (family.kind) {
    case FamilyKind::Exponential:
      return -std::log(u) / lambda;
    case FamilyKind::Weibull:
      return std::pow(-std::log(u), 1.0 / family.params[1]) / lambda;
    case FamilyKind::LogLogistic:
      // S = 1/(1+(lambda t)^alpha) = u  =>  (lambda t)^alpha = (1-u)/u
      return std::pow((1.0 - u) / u, 1.0 / family.params[1]) / lambda;
    case FamilyKind::LogNormal:
      return std::exp(family.params[0] + family.params[1] * std_normal_quantile(1.0 - u));
  }
  throw InvalidInputError("unknown family");
}

Cohort simulate_cohort(const SimSpec& spec) {
  if (spec.n < 0) {
    throw InvalidInputError("simulate_cohort: n must be >= 0");
  }
  if (spec.censor_time && !(*spec.censor_time > 0.0)) {
    throw InvalidInputError("simulate_cohort: censor_time must be positive");
  }
  // Validates the parameters.
  survival(spec.family, 0.0);

  std::mt19937_64 rng(spec.seed);
  const auto uniform = [&rng]() {
    double u = 0.0;
    do {
      u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    } while (u == 0.0);
    return u;
  };

  Cohort cohort;
  cohort.label = family_name(spec.family.kind);
  cohort.observations.reserve(static_cast<std::size_t>(spec.n));
  for (int i = 0; i < spec.n; ++i) {
    const double t = inverse_survival(spec.family, uniform());
    if (spec.censor_time && t > *spec.censor_time) {
      cohort.observations.push_back({*spec.censor_time, true});
    } else {
      cohort.observations.push_back({t, false});
    }
  }
  return cohort;
}

}  // namespace churnkit
