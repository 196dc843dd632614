#pragma once

#include <functional>
#include <vector>

namespace nvac {

// Small dense Levenberg-Marquardt for the few-parameter fits in this
// toolkit. Residuals r(x) of length m, analytic Jacobian J (row-major m x n),
// minimizes |r|^2.
struct LMOptions {
  int max_iter = 200;
  double ftol = 1e-14;    // relative SSR improvement convergence
  double xtol = 1e-14;    // relative step convergence
  double lambda0 = 1e-3;  // initial damping
};

struct LMResult {
  std::vector<double> x;
  double ssr = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> jtj;  // n x n Gauss-Newton Hessian at the optimum
};

using LMResidualFn = std::function<void(const std::vector<double>& x, std::vector<double>& r)>;
using LMJacobianFn = std::function<void(const std::vector<double>& x, std::vector<double>& jac)>;
// Optional projection applied after each accepted step (box constraints etc).
using LMProjectFn = std::function<void(std::vector<double>& x)>;

LMResult levmar_fit(int n_residuals, const LMResidualFn& residuals, const LMJacobianFn& jacobian,
                    std::vector<double> x0, const LMOptions& opts = {},
                    const LMProjectFn& project = nullptr);

// Solves the symmetric positive-definite system A*x = b (n <= 8) in place.
// Returns false if the Cholesky factorization breaks down.
bool solve_spd(std::vector<double> a, std::vector<double> b, int n, std::vector<double>& x);

}  // namespace nvac
