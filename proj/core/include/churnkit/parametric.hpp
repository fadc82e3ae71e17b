#ifndef CHURNKIT_PARAMETRIC_HPP
#define CHURNKIT_PARAMETRIC_HPP

#include <optional>
#include <string>
#include <vector>

#include "churnkit/numerics.hpp"
#include "churnkit/types.hpp"

namespace churnkit {

enum class FamilyKind { Exponential, Weibull, LogLogistic, LogNormal };

std::string family_name(FamilyKind kind);
std::optional<FamilyKind> family_from_name(const std::string& name);

/// A distribution family with its parameter vector:
///   Exponential(lambda), Weibull(lambda, alpha), LogLogistic(lambda, alpha),
///   LogNormal(mu, sigma). lambda, alpha, sigma must be positive.
struct Family {
  FamilyKind kind = FamilyKind::Exponential;
  std::vector<double> params;
};

Family make_exponential(double lambda);
Family make_weibull(double lambda, double alpha);
Family make_loglogistic(double lambda, double alpha);
Family make_lognormal(double mu, double sigma);

/// Names of the parameters in the order they appear in Family::params.
std::vector<std::string> param_names(FamilyKind kind);

double survival(const Family& family, double t);
double hazard(const Family& family, double t);
double cum_hazard(const Family& family, double t);
double density(const Family& family, double t);

/// Half of the default one-second ingestion resolution, in hours. Families
/// whose density involves log t cannot take an uncensored zero duration;
/// such durations are replaced by this value before evaluating the
/// likelihood.
inline constexpr double kZeroDurationReplacementHours = 0.5 / 3600.0;

/// Censored log-likelihood: sum of log f over uncensored observations plus
/// log S over censored ones.
double log_likelihood(const Family& family, const Cohort& cohort,
                      double zero_replacement = kZeroDurationReplacementHours);

struct ParamCi {
  double lower = 0.0;
  double upper = 0.0;
};

/// Result of a parametric fit. covariance is the inverse observed
/// information mapped back to the original parameter scale; ci holds the
/// per-parameter normal-approximation intervals.
struct FitResult {
  Family family;
  double log_likelihood = 0.0;
  Matrix covariance;
  std::vector<ParamCi> ci;
  int churn_count = 0;          // d = number of uncensored observations
  double total_time_at_risk = 0.0;  // R = sum of all durations
  double conf_level = 0.95;
  bool hessian_warning = false;  // observed information not positive definite
};

/// Closed-form exponential fit: lambda = d/R, Var[lambda] = d/R^2, plain
/// normal CI lambda +- z sqrt(Var). Throws DegenerateDataError when d = 0
/// or R = 0.
FitResult fit_exponential(const Cohort& cohort, double conf_level);

struct FitOptions {
  double conf_level = 0.95;
  double zero_replacement = kZeroDurationReplacementHours;
  NewtonOptions newton;
};

/// Maximum-likelihood fit of any family. Optimizes in log-parameter space
/// (log lambda, log alpha, log sigma; mu unconstrained) with Newton-Raphson
/// and maps the covariance back by the delta method.
FitResult fit_mle(FamilyKind kind, const Cohort& cohort, double conf_level);
FitResult fit_mle(FamilyKind kind, const Cohort& cohort, const FitOptions& options);

}  // namespace churnkit

#endif  // CHURNKIT_PARAMETRIC_HPP
