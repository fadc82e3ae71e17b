#include "churnkit/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace churnkit {

namespace {
constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;
}  // namespace

double std_normal_cdf(double x) {
  // erfc keeps full relative accuracy in the lower tail, where the naive
  // 0.5*(1 + erf(.)) form cancels.
  return 0.5 * std::erfc(-x * kInvSqrt2);
}

double std_normal_pdf(double x) {
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw InvalidInputError("std_normal_quantile: p must be in (0,1), got " + std::to_string(p));
  }
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (std_normal_cdf(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double chi_square_1df_sf(double x) {
  if (x < 0.0 || !std::isfinite(x)) {
    throw InvalidInputError("chi_square_1df_sf: x must be finite and >= 0, got " + std::to_string(x));
  }
  // 2(1 - Phi(sqrt(x))) = erfc(sqrt(x/2))
  return std::erfc(std::sqrt(0.5 * x));
}

NormalQuantileTable make_normal_quantile(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInputError("make_normal_quantile: alpha must be in (0,1)");
  }
  return NormalQuantileTable{alpha, std_normal_quantile(1.0 - 0.5 * alpha)};
}

double z_for_conf_level(double conf_level) {
  if (!(conf_level > 0.0 && conf_level < 1.0)) {
    throw InvalidInputError("conf_level must be in (0,1), got " + std::to_string(conf_level));
  }
  return make_normal_quantile(1.0 - conf_level).z;
}

Matrix Matrix::identity(int n) {
  Matrix eye(n, n);
  for (int i = 0; i < n; ++i) eye(i, i) = 1.0;
  return eye;
}

Matrix invert(Matrix a) {
  if (a.rows() != a.cols()) {
    throw InvalidInputError("invert: matrix must be square");
  }
  const int n = a.rows();
  Matrix inv = Matrix::identity(n);
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    double best = std::fabs(a(col, col));
    for (int i = col + 1; i < n; ++i) {
      const double v = std::fabs(a(i, col));
      if (v > best) {
        best = v;
        pivot = i;
      }
    }
    if (best == 0.0 || !std::isfinite(best)) {
      throw NumericalError("invert: singular matrix");
    }
    if (pivot != col) {
      for (int j = 0; j < n; ++j) {
        std::swap(a(col, j), a(pivot, j));
        std::swap(inv(col, j), inv(pivot, j));
      }
    }
    const double d = a(col, col);
    for (int j = 0; j < n; ++j) {
      a(col, j) /= d;
      inv(col, j) /= d;
    }
    for (int i = 0; i < n; ++i) {
      if (i == col) continue;
      const double f = a(i, col);
      if (f == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        a(i, j) -= f * a(col, j);
        inv(i, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

std::vector<double> solve(Matrix a, std::vector<double> b) {
  if (a.rows() != a.cols() || a.rows() != static_cast<int>(b.size())) {
    throw InvalidInputError("solve: dimension mismatch");
  }
  Matrix inv = invert(std::move(a));
  const int n = inv.rows();
  std::vector<double> x(b.size(), 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += inv(i, j) * b[j];
    x[i] = s;
  }
  return x;
}

namespace {

double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

bool all_finite(const ObjectiveEval& e, std::size_t dim) {
  if (!std::isfinite(e.value) || e.gradient.size() != dim) return false;
  for (double g : e.gradient) {
    if (!std::isfinite(g)) return false;
  }
  if (e.hessian.rows() != static_cast<int>(dim) || e.hessian.cols() != static_cast<int>(dim)) {
    return false;
  }
  for (int i = 0; i < e.hessian.rows(); ++i) {
    for (int j = 0; j < e.hessian.cols(); ++j) {
      if (!std::isfinite(e.hessian(i, j))) return false;
    }
  }
  return true;
}

}  // namespace

std::vector<double> newton_raphson(const Objective& objective,
                                   std::vector<double> init,
                                   const NewtonOptions& options) {
  if (init.empty()) {
    throw InvalidInputError("newton_raphson: empty initial point");
  }
  const std::size_t dim = init.size();
  std::vector<double> x = std::move(init);
  ObjectiveEval eval = objective(x);
  if (!all_finite(eval, dim)) {
    throw NumericalError("newton_raphson: objective not finite at the initial point");
  }

  for (int iter = 0; iter < options.max_iter; ++iter) {
    if (sup_norm(eval.gradient) <= options.tol) {
      return x;
    }
    // Newton step for a maximum: x - H^{-1} g.
    std::vector<double> step = solve(eval.hessian, eval.gradient);
    for (double& s : step) s = -s;

    // Near the optimum the true improvement can fall below the rounding
    // noise of a large-sample log-likelihood even while the gradient keeps
    // shrinking, so treat value changes within this slack as an increase.
    const double slack = 1e-12 * (1.0 + std::fabs(eval.value));
    double scale = 1.0;
    bool accepted = false;
    for (int h = 0; h <= options.max_halvings; ++h) {
      std::vector<double> candidate(dim);
      for (std::size_t k = 0; k < dim; ++k) candidate[k] = x[k] + scale * step[k];
      ObjectiveEval next = objective(candidate);
      if (all_finite(next, dim) &&
          (next.value > eval.value - slack || sup_norm(next.gradient) <= options.tol)) {
        x = std::move(candidate);
        eval = std::move(next);
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted) {
      throw ConvergenceError("newton_raphson: step halving failed to improve the objective", x);
    }
  }
  if (sup_norm(eval.gradient) <= options.tol) {
    return x;
  }
  throw ConvergenceError("newton_raphson: no convergence after " +
                             std::to_string(options.max_iter) + " iterations",
                         x);
}

}  // namespace churnkit
