#include "churnkit/parametric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace churnkit {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kLogSqrt2Pi = 0.9189385332046727418;

void check_params(const Family& family) {
  const std::size_t want = family.kind == FamilyKind::Exponential ? 1 : 2;
  if (family.params.size() != want) {
    throw InvalidInputError("family " + family_name(family.kind) + " takes " +
                            std::to_string(want) + " parameter(s)");
  }
  for (std::size_t i = 0; i < family.params.size(); ++i) {
    const double p = family.params[i];
    const bool positive_required = !(family.kind == FamilyKind::LogNormal && i == 0);
    if (!std::isfinite(p) || (positive_required && p <= 0.0)) {
      throw InvalidInputError("invalid parameter for family " + family_name(family.kind));
    }
  }
}

void check_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw InvalidInputError("t must be finite and >= 0, got " + std::to_string(t));
  }
}

// log Phi(-z), accurate for large positive z where Phi(-z) underflows.
double log_std_normal_sf(double z) {
  if (z < 30.0) {
    return std::log(0.5 * std::erfc(z * kInvSqrt2));
  }
  const double zz = z * z;
  return -0.5 * zz - std::log(z) - kLogSqrt2Pi + std::log1p(-1.0 / zz + 3.0 / (zz * zz));
}

// Inverse Mills ratio phi(z) / Phi(-z).
double mills_ratio(double z) {
  if (z < 30.0) {
    return std_normal_pdf(z) / (0.5 * std::erfc(z * kInvSqrt2));
  }
  return z + 1.0 / z;
}

}  // namespace

std::string family_name(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::Exponential: return "exponential";
    case FamilyKind::Weibull: return "weibull";
    case FamilyKind::LogLogistic: return "loglogistic";
    case FamilyKind::LogNormal: return "lognormal";
  }
  return "unknown";
}

std::optional<FamilyKind> family_from_name(const std::string& name) {
  if (name == "exponential") return FamilyKind::Exponential;
  if (name == "weibull") return FamilyKind::Weibull;
  if (name == "loglogistic") return FamilyKind::LogLogistic;
  if (name == "lognormal") return FamilyKind::LogNormal;
  return std::nullopt;
}

Family make_exponential(double lambda) {
  Family f{FamilyKind::Exponential, {lambda}};
  check_params(f);
  return f;
}

Family make_weibull(double lambda, double alpha) {
  Family f{FamilyKind::Weibull, {lambda, alpha}};
  check_params(f);
  return f;
}

Family make_loglogistic(double lambda, double alpha) {
  Family f{FamilyKind::LogLogistic, {lambda, alpha}};
  check_params(f);
  return f;
}

Family make_lognormal(double mu, double sigma) {
  Family f{FamilyKind::LogNormal, {mu, sigma}};
  check_params(f);
  return f;
}

std::vector<std::string> param_names(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::Exponential: return {"lambda"};
    case FamilyKind::Weibull: return {"lambda", "alpha"};
    case FamilyKind::LogLogistic: return {"lambda", "alpha"};
    case FamilyKind::LogNormal: return {"mu", "sigma"};
  }
  return {};
}

double survival(const Family& family, double t) {
  check_params(family);
  check_time(t);
  switch (family.kind) {
    case FamilyKind::Exponential:
      return std::exp(-family.params[0] * t);
    case FamilyKind::Weibull:
      return std::exp(-std::pow(family.params[0] * t, family.params[1]));
    case FamilyKind::LogLogistic:
      return 1.0 / (1.0 + std::pow(family.params[0] * t, family.params[1]));
    case FamilyKind::LogNormal: {
      if (t == 0.0) return 1.0;  // right limit
      const double z = (std::log(t) - family.params[0]) / family.params[1];
      return 0.5 * std::erfc(z * kInvSqrt2);
    }
  }
  return 0.0;
}

double cum_hazard(const Family& family, double t) {
  check_params(family);
  check_time(t);
  switch (family.kind) {
    case FamilyKind::Exponential:
      return family.params[0] * t;
    case FamilyKind::Weibull:
      return std::pow(family.params[0] * t, family.params[1]);
    case FamilyKind::LogLogistic:
      return std::log1p(std::pow(family.params[0] * t, family.params[1]));
    case FamilyKind::LogNormal: {
      if (t == 0.0) return 0.0;
      const double z = (std::log(t) - family.params[0]) / family.params[1];
      return -log_std_normal_sf(z);
    }
  }
  return 0.0;
}

double hazard(const Family& family, double t) {
  check_params(family);
  check_time(t);
  const double lambda = family.params[0];
  switch (family.kind) {
    case FamilyKind::Exponential:
      return lambda;
    case FamilyKind::Weibull: {
      const double alpha = family.params[1];
      return lambda * alpha * std::pow(lambda * t, alpha - 1.0);
    }
    case FamilyKind::LogLogistic: {
      const double alpha = family.params[1];
      const double y = std::pow(lambda * t, alpha);
      return lambda * alpha * std::pow(lambda * t, alpha - 1.0) / (1.0 + y);
    }
    case FamilyKind::LogNormal: {
      if (t == 0.0) return 0.0;
      const double sigma = family.params[1];
      const double z = (std::log(t) - family.params[0]) / sigma;
      return mills_ratio(z) / (sigma * t);
    }
  }
  return 0.0;
}

double density(const Family& family, double t) {
  check_params(family);
  check_time(t);
  if (family.kind == FamilyKind::LogNormal) {
    if (t == 0.0) return 0.0;
    const double sigma = family.params[1];
    const double z = (std::log(t) - family.params[0]) / sigma;
    return std_normal_pdf(z) / (sigma * t);
  }
  return hazard(family, t) * survival(family, t);
}

double log_likelihood(const Family& family, const Cohort& cohort, double zero_replacement) {
  check_params(family);
  double total = 0.0;
  const bool needs_log_t = family.kind != FamilyKind::Exponential;
  for (const Observation& obs : cohort.observations) {
    check_time(obs.duration_hours);
    double t = obs.duration_hours;
    if (needs_log_t && !obs.censored && t == 0.0) t = zero_replacement;
    if (obs.censored) {
      if (t == 0.0) continue;  // log S(0) = 0
      total += -cum_hazard(family, t);
      continue;
    }
    switch (family.kind) {
      case FamilyKind::Exponential:
        total += std::log(family.params[0]) - family.params[0] * t;
        break;
      case FamilyKind::Weibull: {
        const double lambda = family.params[0], alpha = family.params[1];
        const double w = std::log(lambda * t);
        total += std::log(lambda) + std::log(alpha) + (alpha - 1.0) * w - std::exp(alpha * w);
        break;
      }
      case FamilyKind::LogLogistic: {
        const double lambda = family.params[0], alpha = family.params[1];
        const double w = std::log(lambda * t);
        const double y = std::exp(alpha * w);
        total += std::log(lambda) + std::log(alpha) + (alpha - 1.0) * w - 2.0 * std::log1p(y);
        break;
      }
      case FamilyKind::LogNormal: {
        const double mu = family.params[0], sigma = family.params[1];
        const double z = (std::log(t) - mu) / sigma;
        total += -kLogSqrt2Pi - 0.5 * z * z - std::log(sigma) - std::log(t);
        break;
      }
    }
  }
  return total;
}

FitResult fit_exponential(const Cohort& cohort, double conf_level) {
  const double z = z_for_conf_level(conf_level);
  int d = 0;
  double r = 0.0;
  for (const Observation& obs : cohort.observations) {
    check_time(obs.duration_hours);
    if (!obs.censored) ++d;
    r += obs.duration_hours;
  }
  if (d == 0 || r <= 0.0) {
    throw DegenerateDataError("fit_exponential: needs at least one event and positive time at risk");
  }
  const double lambda = d / r;
  const double var = d / (r * r);

  FitResult fit;
  fit.family = make_exponential(lambda);
  fit.log_likelihood = d * std::log(lambda) - lambda * r;
  fit.covariance = Matrix(1, 1);
  fit.covariance(0, 0) = var;
  const double half = z * std::sqrt(var);
  fit.ci = {ParamCi{lambda - half, lambda + half}};
  fit.churn_count = d;
  fit.total_time_at_risk = r;
  fit.conf_level = conf_level;
  return fit;
}

namespace {

// Working data for the log-parameter-space likelihood: durations with
// uncensored zeros replaced for the log-based families.
struct FitData {
  std::vector<double> t;
  std::vector<bool> censored;
  int d = 0;
  double r_raw = 0.0;
};

FitData prepare_data(FamilyKind kind, const Cohort& cohort, double zero_replacement) {
  FitData data;
  const bool needs_log_t = kind != FamilyKind::Exponential;
  data.t.reserve(cohort.size());
  data.censored.reserve(cohort.size());
  for (const Observation& obs : cohort.observations) {
    check_time(obs.duration_hours);
    double t = obs.duration_hours;
    data.r_raw += t;
    if (!obs.censored) {
      ++data.d;
      if (needs_log_t && t == 0.0) t = zero_replacement;
    }
    data.t.push_back(t);
    data.censored.push_back(obs.censored);
  }
  return data;
}

Family family_from_theta(FamilyKind kind, const std::vector<double>& theta) {
  switch (kind) {
    case FamilyKind::Exponential:
      return make_exponential(std::exp(theta[0]));
    case FamilyKind::Weibull:
      return make_weibull(std::exp(theta[0]), std::exp(theta[1]));
    case FamilyKind::LogLogistic:
      return make_loglogistic(std::exp(theta[0]), std::exp(theta[1]));
    case FamilyKind::LogNormal:
      return make_lognormal(theta[0], std::exp(theta[1]));
  }
  throw InvalidInputError("unknown family");
}

double log_lik_theta(FamilyKind kind, const FitData& data, const std::vector<double>& theta) {
  double total = 0.0;
  switch (kind) {
    case FamilyKind::Exponential: {
      const double lambda = std::exp(theta[0]);
      for (std::size_t i = 0; i < data.t.size(); ++i) {
        total += data.censored[i] ? -lambda * data.t[i]
                                  : theta[0] - lambda * data.t[i];
      }
      break;
    }
    case FamilyKind::Weibull: {
      const double alpha = std::exp(theta[1]);
      for (std::size_t i = 0; i < data.t.size(); ++i) {
        const double t = data.t[i];
        if (t == 0.0) continue;  // censored at zero contributes nothing
        const double w = theta[0] + std::log(t);
        const double y = std::exp(alpha * w);
        total -= y;
        if (!data.censored[i]) total += theta[0] + theta[1] + (alpha - 1.0) * w;
      }
      break;
    }
    case FamilyKind::LogLogistic: {
      const double alpha = std::exp(theta[1]);
      for (std::size_t i = 0; i < data.t.size(); ++i) {
        const double t = data.t[i];
        if (t == 0.0) continue;
        const double w = theta[0] + std::log(t);
        const double y = std::exp(alpha * w);
        total -= (data.censored[i] ? 1.0 : 2.0) * std::log1p(y);
        if (!data.censored[i]) total += theta[0] + theta[1] + (alpha - 1.0) * w;
      }
      break;
    }
    case FamilyKind::LogNormal: {
      const double mu = theta[0];
      const double sigma = std::exp(theta[1]);
      for (std::size_t i = 0; i < data.t.size(); ++i) {
        const double t = data.t[i];
        if (t == 0.0) continue;
        const double z = (std::log(t) - mu) / sigma;
        if (data.censored[i]) {
          total += log_std_normal_sf(z);
        } else {
          total += -kLogSqrt2Pi - 0.5 * z * z - theta[1] - std::log(t);
        }
      }
      break;
    }
  }
  return total;
}

std::vector<double> gradient_theta(FamilyKind kind, const FitData& data,
                                   const std::vector<double>& theta) {
  switch (kind) {
    case FamilyKind::Exponential: {
      const double lambda = std::exp(theta[0]);
      double g = data.d;
      for (std::size_t i = 0; i < data.t.size(); ++i) g -= lambda * data.t[i];
      return {g};
    }
    case FamilyKind::Weibull: {
      const double alpha = std::exp(theta[1]);
      double sum_y = 0.0, sum_y_log_y = 0.0, sum_log_y_unc = 0.0;
      for (std::size_t i = 0; i < data.t.size(); ++i) {
        const double t = data.t[i];
        if (t == 0.0) continue;
        const double log_y = alpha * (theta[0] + std::log(t));
        const double y = std::exp(log_y);
        sum_y += y;
        sum_y_log_y += y * log_y;
        if (!data.censored[i]) sum_log_y_unc += log_y;
      }
      return {alpha * (data.d - sum_y), data.d + sum_log_y_unc - sum_y_log_y};
    }
    case FamilyKind::LogLogistic: {
      const double alpha = std::exp(theta[1]);
      double sum_cr = 0.0, sum_cr_log_y = 0.0, sum_log_y_unc = 0.0;
      for (std::size_t i = 0; i < data.t.size(); ++i) {
        const double t = data.t[i];
        if (t == 0.0) continue;
        const double log_y = alpha * (theta[0] + std::log(t));
        const double y = std::exp(log_y);
        const double ratio = std::isinf(y) ? 1.0 : y / (1.0 + y);
        const double c = data.censored[i] ? 1.0 : 2.0;
        sum_cr += c * ratio;
        sum_cr_log_y += c * ratio * log_y;
        if (!data.censored[i]) sum_log_y_unc += log_y;
      }
      return {alpha * (data.d - sum_cr), data.d + sum_log_y_unc - sum_cr_log_y};
    }
    case FamilyKind::LogNormal: {
      const double mu = theta[0];
      const double sigma = std::exp(theta[1]);
      double g_mu = 0.0, g_s = 0.0;
      for (std::size_t i = 0; i < data.t.size(); ++i) {
        const double t = data.t[i];
        if (t == 0.0) continue;
        const double z = (std::log(t) - mu) / sigma;
        if (data.censored[i]) {
          const double m = mills_ratio(z);
          g_mu += m / sigma;
          g_s += m * z;
        } else {
          g_mu += z / sigma;
          g_s += z * z - 1.0;
        }
      }
      return {g_mu, g_s};
    }
  }
  throw InvalidInputError("unknown family");
}

Matrix fd_hessian(FamilyKind kind, const FitData& data, const std::vector<double>& theta) {
  const int p = static_cast<int>(theta.size());
  Matrix hess(p, p);
  for (int j = 0; j < p; ++j) {
    const double h = 1e-5 * (1.0 + std::fabs(theta[j]));
    std::vector<double> plus = theta, minus = theta;
    plus[j] += h;
    minus[j] -= h;
    const std::vector<double> gp = gradient_theta(kind, data, plus);
    const std::vector<double> gm = gradient_theta(kind, data, minus);
    for (int k = 0; k < p; ++k) hess(k, j) = (gp[k] - gm[k]) / (2.0 * h);
  }
  for (int j = 0; j < p; ++j) {
    for (int k = j + 1; k < p; ++k) {
      const double s = 0.5 * (hess(j, k) + hess(k, j));
      hess(j, k) = s;
      hess(k, j) = s;
    }
  }
  return hess;
}

std::vector<double> initial_theta(FamilyKind kind, const FitData& data) {
  double r_adj = std::accumulate(data.t.begin(), data.t.end(), 0.0);
  if (r_adj <= 0.0) {
    throw DegenerateDataError("fit_mle: total time at risk is zero");
  }
  const double lambda0 = std::max(data.d / r_adj, 1e-12);
  switch (kind) {
    case FamilyKind::Exponential:
      return {std::log(lambda0)};
    case FamilyKind::Weibull:
    case FamilyKind::LogLogistic:
      return {std::log(lambda0), 0.0};  // alpha starts at 1
    case FamilyKind::LogNormal: {
      double sum = 0.0, sum2 = 0.0;
      int n = 0;
      for (std::size_t i = 0; i < data.t.size(); ++i) {
        if (data.censored[i] || data.t[i] <= 0.0) continue;
        const double lt = std::log(data.t[i]);
        sum += lt;
        sum2 += lt * lt;
        ++n;
      }
      const double mu0 = n > 0 ? sum / n : 0.0;
      double sigma0 = 1.0;
      if (n > 1) {
        const double var = (sum2 - sum * sum / n) / (n - 1);
        sigma0 = std::max(std::sqrt(std::max(var, 0.0)), 0.1);
      }
      return {mu0, std::log(sigma0)};
    }
  }
  throw InvalidInputError("unknown family");
}

}  // namespace

FitResult fit_mle(FamilyKind kind, const Cohort& cohort, double conf_level) {
  FitOptions options;
  options.conf_level = conf_level;
  return fit_mle(kind, cohort, options);
}

FitResult fit_mle(FamilyKind kind, const Cohort& cohort, const FitOptions& options) {
  const double z = z_for_conf_level(options.conf_level);
  const FitData data = prepare_data(kind, cohort, options.zero_replacement);
  const int n_params = kind == FamilyKind::Exponential ? 1 : 2;
  if (data.d < n_params) {
    throw DegenerateDataError("fit_mle: " + family_name(kind) + " needs at least " +
                              std::to_string(n_params) + " uncensored observations");
  }

  const Objective objective = [&](const std::vector<double>& theta) {
    ObjectiveEval eval;
    eval.value = log_lik_theta(kind, data, theta);
    eval.gradient = gradient_theta(kind, data, theta);
    eval.hessian = fd_hessian(kind, data, theta);
    return eval;
  };

  const std::vector<double> theta = newton_raphson(objective, initial_theta(kind, data), options.newton);

  FitResult fit;
  fit.family = family_from_theta(kind, theta);
  fit.log_likelihood = log_lik_theta(kind, data, theta);
  fit.churn_count = data.d;
  fit.total_time_at_risk = data.r_raw;
  fit.conf_level = options.conf_level;

  // Covariance: inverse observed information in theta space, then the
  // delta method back to the original scale (jacobian diag(param) for the
  // log-parametrized coordinates, 1 for mu).
  Matrix hess = fd_hessian(kind, data, theta);
  Matrix info(n_params, n_params);
  for (int i = 0; i < n_params; ++i) {
    for (int j = 0; j < n_params; ++j) info(i, j) = -hess(i, j);
  }
  const bool pos_def = n_params == 1
                           ? info(0, 0) > 0.0
                           : info(0, 0) > 0.0 &&
                                 info(0, 0) * info(1, 1) - info(0, 1) * info(1, 0) > 0.0;
  fit.hessian_warning = !pos_def;

  std::vector<double> jac(n_params, 1.0);
  for (int i = 0; i < n_params; ++i) {
    const bool log_scaled = !(kind == FamilyKind::LogNormal && i == 0);
    if (log_scaled) jac[i] = fit.family.params[i];
  }
  try {
    Matrix cov_theta = invert(info);
    fit.covariance = Matrix(n_params, n_params);
    for (int i = 0; i < n_params; ++i) {
      for (int j = 0; j < n_params; ++j) {
        fit.covariance(i, j) = jac[i] * cov_theta(i, j) * jac[j];
      }
    }
    for (int i = 0; i < n_params; ++i) {
      const double var = fit.covariance(i, i);
      const double half = var >= 0.0 ? z * std::sqrt(var)
                                     : std::numeric_limits<double>::quiet_NaN();
      fit.ci.push_back(ParamCi{fit.family.params[i] - half, fit.family.params[i] + half});
    }
  } catch (const NumericalError&) {
    fit.hessian_warning = true;
    fit.covariance = Matrix(n_params, n_params);
    for (int i = 0; i < n_params; ++i) {
      for (int j = 0; j < n_params; ++j) {
        fit.covariance(i, j) = std::numeric_limits<double>::quiet_NaN();
      }
      fit.ci.push_back(ParamCi{std::numeric_limits<double>::quiet_NaN(),
                               std::numeric_limits<double>::quiet_NaN()});
    }
  }
  return fit;
}

}  // namespace churnkit
