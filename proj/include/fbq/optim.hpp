#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

// Limited-memory BFGS with a monotone Armijo backtracking line search.
// Accepted iterates never increase the objective, so callers that track a
// log-likelihood get a non-decreasing trace for free.

namespace fbq {

struct LbfgsOptions {
  int max_iterations = 3000;
  int history = 10;
  double gradient_tolerance = 1e-7;  // stop when ||g||_2 <= this
  double f_tolerance = 1e-12;        // stop when relative decrease <= this
  double armijo_c1 = 1e-4;
  int max_line_search_steps = 60;
};

struct LbfgsResult {
  Eigen::VectorXd x;
  double f = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> f_trace;  // objective value at each accepted iterate
};

// objective(x, grad) evaluates f(x) and writes the gradient into grad.
LbfgsResult minimize_lbfgs(
    const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>& objective,
    Eigen::VectorXd x0, const LbfgsOptions& options = {});

}  // namespace fbq
