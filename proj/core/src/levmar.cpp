#include "nvac/levmar.hpp"

#include <cmath>
#include <stdexcept>

namespace nvac {

bool solve_spd(std::vector<double> a, std::vector<double> b, int n, std::vector<double>& x) {
  // Cholesky A = L L^T, then forward/back substitution. a is row-major n x n.
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a[i * n + j];
      for (int k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      if (i == j) {
        if (s <= 0.0 || !std::isfinite(s)) return false;
        a[i * n + i] = std::sqrt(s);
      } else {
        a[i * n + j] = s / a[j * n + j];
      }
    }
  }
  x.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double s = b[static_cast<std::size_t>(i)];
    for (int k = 0; k < i; ++k) s -= a[i * n + k] * x[static_cast<std::size_t>(k)];
    x[static_cast<std::size_t>(i)] = s / a[i * n + i];
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = x[static_cast<std::size_t>(i)];
    for (int k = i + 1; k < n; ++k) s -= a[k * n + i] * x[static_cast<std::size_t>(k)];
    x[static_cast<std::size_t>(i)] = s / a[i * n + i];
  }
  return true;
}

namespace {

double sum_sq(const std::vector<double>& r) {
  double s = 0.0;
  for (double v : r) s += v * v;
  return s;
}

}  // namespace

LMResult levmar_fit(int n_residuals, const LMResidualFn& residuals, const LMJacobianFn& jacobian,
                    std::vector<double> x0, const LMOptions& opts, const LMProjectFn& project) {
  const int m = n_residuals;
  const int n = static_cast<int>(x0.size());
  if (m < n) throw std::invalid_argument("levmar_fit: fewer residuals than parameters");

  std::vector<double> x = std::move(x0);
  if (project) project(x);
  std::vector<double> r(static_cast<std::size_t>(m));
  std::vector<double> jac(static_cast<std::size_t>(m) * n);
  std::vector<double> jtj(static_cast<std::size_t>(n) * n);
  std::vector<double> jtr(static_cast<std::size_t>(n));
  std::vector<double> step;

  residuals(x, r);
  double ssr = sum_sq(r);
  double lambda = opts.lambda0;

  LMResult out;
  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    jacobian(x, jac);
    for (int a = 0; a < n; ++a) {
      jtr[static_cast<std::size_t>(a)] = 0.0;
      for (int b = a; b < n; ++b) {
        double s = 0.0;
        for (int k = 0; k < m; ++k) s += jac[k * n + a] * jac[k * n + b];
        jtj[a * n + b] = s;
        jtj[b * n + a] = s;
      }
      double s = 0.0;
      for (int k = 0; k < m; ++k) s += jac[k * n + a] * r[static_cast<std::size_t>(k)];
      jtr[static_cast<std::size_t>(a)] = s;
    }

    bool stepped = false;
    for (int attempt = 0; attempt < 40 && !stepped; ++attempt) {
      std::vector<double> damped = jtj;
      for (int a = 0; a < n; ++a)
        damped[a * n + a] += lambda * std::max(jtj[a * n + a], 1e-300);
      std::vector<double> rhs(static_cast<std::size_t>(n));
      for (int a = 0; a < n; ++a) rhs[static_cast<std::size_t>(a)] = -jtr[static_cast<std::size_t>(a)];
      if (!solve_spd(damped, rhs, n, step)) {
        lambda *= 10.0;
        continue;
      }
      std::vector<double> x_try = x;
      for (int a = 0; a < n; ++a) x_try[static_cast<std::size_t>(a)] += step[static_cast<std::size_t>(a)];
      if (project) project(x_try);
      std::vector<double> r_try(static_cast<std::size_t>(m));
      residuals(x_try, r_try);
      const double ssr_try = sum_sq(r_try);
      if (std::isfinite(ssr_try) && ssr_try <= ssr) {
        double step_norm = 0.0, x_norm = 0.0;
        for (int a = 0; a < n; ++a) {
          const double dx = x_try[static_cast<std::size_t>(a)] - x[static_cast<std::size_t>(a)];
          step_norm += dx * dx;
          x_norm += x[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
        }
        const double improvement = ssr - ssr_try;
        x = std::move(x_try);
        r = std::move(r_try);
        ssr = ssr_try;
        lambda = std::max(lambda * 0.3, 1e-14);
        stepped = true;
        if (improvement <= opts.ftol * std::max(ssr, 1e-300) ||
            step_norm <= opts.xtol * opts.xtol * std::max(x_norm, 1e-300)) {
          out.converged = true;
          ++iter;
          goto done;
        }
      } else {
        lambda *= 10.0;
      }
    }
    if (!stepped) {
      // Damping exhausted: local minimum to working precision.
      out.converged = true;
      break;
    }
  }
done:
  // Refresh the Gauss-Newton Hessian at the optimum for covariance use.
  jacobian(x, jac);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double s = 0.0;
      for (int k = 0; k < m; ++k) s += jac[k * n + a] * jac[k * n + b];
      jtj[a * n + b] = s;
    }
  out.x = std::move(x);
  out.ssr = ssr;
  out.iterations = iter;
  out.jtj = std::move(jtj);
  return out;
}

}  // namespace nvac
