#ifndef CHURNKIT_NUMERICS_HPP
#define CHURNKIT_NUMERICS_HPP

#include <functional>
#include <stdexcept>
#include <vector>

#include "churnkit/types.hpp"

namespace churnkit {

/// Standard normal CDF, absolute error below 1e-10 over |x| <= 8.
double std_normal_cdf(double x);

/// Standard normal density (2*pi)^{-1/2} exp(-x^2/2).
double std_normal_pdf(double x);

/// Standard normal quantile, solved by bisection on std_normal_cdf to
/// better than 1e-9. p must lie strictly inside (0,1).
double std_normal_quantile(double p);

/// Upper-tail probability of a chi-square variable with one degree of
/// freedom: P(X > x) = 2(1 - Phi(sqrt(x))). Accurate deep into the tail.
double chi_square_1df_sf(double x);

/// Two-sided critical value of the standard normal for significance
/// level alpha, e.g. alpha = 0.05 -> 1.96.
struct NormalQuantileTable {
  double alpha = 0.05;
  double z = 1.959964;
};

NormalQuantileTable make_normal_quantile(double alpha);

/// z for a confidence level, e.g. 0.95 -> 1.96.
double z_for_conf_level(double conf_level);

/// Minimal dense matrix; big enough for the 1-2 parameter problems here.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, 0.0) {}

  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

  static Matrix identity(int n);

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

/// Raised for singular systems and other numeric breakdowns.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an iteration fails to converge; carries the last iterate.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> last)
      : std::runtime_error(what), last_iterate(std::move(last)) {}
  std::vector<double> last_iterate;
};

/// Gauss-Jordan inverse with partial pivoting. Throws NumericalError on a
/// singular matrix.
Matrix invert(Matrix a);

/// Solves a x = b. Throws NumericalError on a singular matrix.
std::vector<double> solve(Matrix a, std::vector<double> b);

/// Objective value with derivatives at one point, as produced by the
/// callback handed to newton_raphson.
struct ObjectiveEval {
  double value = 0.0;
  std::vector<double> gradient;
  Matrix hessian;
};

using Objective = std::function<ObjectiveEval(const std::vector<double>&)>;

struct NewtonOptions {
  double tol = 1e-8;      // gradient sup-norm at which to stop
  int max_iter = 100;
  int max_halvings = 30;  // backtracking when a step fails to improve
};

/// Maximizes the objective by Newton-Raphson with step halving. Returns a
/// point whose gradient sup-norm is <= options.tol; otherwise throws
/// ConvergenceError with the last iterate attached.
std::vector<double> newton_raphson(const Objective& objective,
                                   std::vector<double> init,
                                   const NewtonOptions& options = {});

}  // namespace churnkit

#endif  // CHURNKIT_NUMERICS_HPP
