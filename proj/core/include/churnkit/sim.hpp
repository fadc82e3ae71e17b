#ifndef CHURNKIT_SIM_HPP
#define CHURNKIT_SIM_HPP

#include <cstdint>
#include <optional>

#include "churnkit/parametric.hpp"
#include "churnkit/types.hpp"

namespace churnkit {

/// Synthetic-cohort recipe: n i.i.d. draws from a Table-V family with
/// optional administrative censoring at a fixed time. The random source is
/// std::mt19937_64 with uniforms taken as (x >> 11) * 2^-53, so a given
/// seed reproduces the same cohort everywhere.
struct SimSpec {
  Family family;
  int n = 0;
  std::optional<double> censor_time;
  std::uint64_t seed = 0;
};

/// Draws by inverting the survival function: t = S^{-1}(u). Draws beyond
/// censor_time come back as censored observations at censor_time.
Cohort simulate_cohort(const SimSpec& spec);

/// S^{-1}(u) for u in (0,1); exposed for the simulation oracles.
double inverse_survival(const Family& family, double u);

}  // namespace churnkit

#endif  // CHURNKIT_SIM_HPP
