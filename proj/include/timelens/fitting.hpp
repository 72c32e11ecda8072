#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace timelens::detail {

/// Dense Levenberg-Marquardt for a handful of parameters. The model callback
/// fills residuals r_i(p) and the Jacobian ∂r_i/∂p_j for the current
/// parameter vector. Fully deterministic: fixed damping schedule, fixed
/// iteration and convergence thresholds.
class LevenbergMarquardt {
 public:
  using Model = std::function<void(std::span<const double> params,
                                   std::vector<double>& residuals,
                                   std::vector<std::vector<double>>& jacobian)>;

  struct Result {
    std::vector<double> params;
    double cost = 0.0;  // sum of squared residuals
    int iterations = 0;
    bool converged = false;
  };

  static Result fit(const Model& model, std::vector<double> params,
                    int max_iterations = 200) {
    const std::size_t np = params.size();
    std::vector<double> residuals;
    std::vector<std::vector<double>> jac;
    model(params, residuals, jac);
    double cost = dot(residuals, residuals);

    double lambda = 1e-3;
    Result result{params, cost, 0, false};
    for (int iter = 0; iter < max_iterations; ++iter) {
      ++result.iterations;
      // Normal equations J'J + λ·diag(J'J).
      std::vector<std::vector<double>> a(np, std::vector<double>(np, 0.0));
      std::vector<double> g(np, 0.0);
      for (std::size_t i = 0; i < residuals.size(); ++i)
        for (std::size_t j = 0; j < np; ++j) {
          g[j] += jac[i][j] * residuals[i];
          for (std::size_t k = j; k < np; ++k)
            a[j][k] += jac[i][j] * jac[i][k];
        }
      for (std::size_t j = 0; j < np; ++j)
        for (std::size_t k = 0; k < j; ++k) a[j][k] = a[k][j];

      bool stepped = false;
      for (int attempt = 0; attempt < 24 && !stepped; ++attempt) {
        auto damped = a;
        for (std::size_t j = 0; j < np; ++j)
          damped[j][j] += lambda * (a[j][j] > 0.0 ? a[j][j] : 1.0);
        std::vector<double> step;
        if (!solve(damped, g, step)) {
          lambda *= 10.0;
          continue;
        }
        std::vector<double> trial(params);
        for (std::size_t j = 0; j < np; ++j) trial[j] -= step[j];
        std::vector<double> trial_res;
        std::vector<std::vector<double>> trial_jac;
        model(trial, trial_res, trial_jac);
        const double trial_cost = dot(trial_res, trial_res);
        if (std::isfinite(trial_cost) && trial_cost <= cost) {
          const double rel_drop = (cost - trial_cost) / (cost > 0.0 ? cost : 1.0);
          double rel_step = 0.0;
          for (std::size_t j = 0; j < np; ++j) {
            const double scale = std::abs(params[j]) + 1e-300;
            rel_step = std::max(rel_step, std::abs(step[j]) / scale);
          }
          params = std::move(trial);
          residuals = std::move(trial_res);
          jac = std::move(trial_jac);
          cost = trial_cost;
          lambda = std::max(lambda * 0.3, 1e-12);
          stepped = true;
          if (rel_drop < 1e-14 || rel_step < 1e-12) {
            result.converged = true;
          }
        } else {
          lambda *= 10.0;
        }
      }
      result.params = params;
      result.cost = cost;
      if (!stepped || result.converged) {
        result.converged = true;  // no improving step left
        break;
      }
    }
    return result;
  }

 private:
  static double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  }

  // Gaussian elimination with partial pivoting; false on singular systems.
  static bool solve(std::vector<std::vector<double>> a, std::vector<double> b,
                    std::vector<double>& x) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
      std::size_t pivot = col;
      for (std::size_t row = col + 1; row < n; ++row)
        if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
      if (a[pivot][col] == 0.0) return false;
      std::swap(a[pivot], a[col]);
      std::swap(b[pivot], b[col]);
      for (std::size_t row = col + 1; row < n; ++row) {
        const double m = a[row][col] / a[col][col];
        for (std::size_t k = col; k < n; ++k) a[row][k] -= m * a[col][k];
        b[row] -= m * b[col];
      }
    }
    x.assign(n, 0.0);
    for (std::size_t row = n; row-- > 0;) {
      double s = b[row];
      for (std::size_t k = row + 1; k < n; ++k) s -= a[row][k] * x[k];
      x[row] = s / a[row][row];
    }
    return true;
  }
};

}  // namespace timelens::detail
