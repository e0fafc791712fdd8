#include "fbq/optim.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

namespace fbq {

LbfgsResult minimize_lbfgs(
    const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>& objective,
    Eigen::VectorXd x0, const LbfgsOptions& opt) {
  const Eigen::Index n = x0.size();
  if (n == 0) throw std::invalid_argument("minimize_lbfgs: empty parameter vector");

  Eigen::VectorXd x = std::move(x0);
  Eigen::VectorXd g(n), g_new(n);
  double f = objective(x, g);
  if (!std::isfinite(f)) throw std::runtime_error("minimize_lbfgs: objective not finite at x0");

  std::deque<Eigen::VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;

  LbfgsResult result;
  result.f_trace.push_back(f);

  int iter = 0;
  for (; iter < opt.max_iterations; ++iter) {
    double gnorm = g.norm();
    if (gnorm <= opt.gradient_tolerance) {
      result.converged = true;
      break;
    }

    // Two-loop recursion for the search direction.
    Eigen::VectorXd q = -g;
    const int m = static_cast<int>(s_hist.size());
    std::vector<double> alpha(m);
    for (int i = m - 1; i >= 0; --i) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alpha[i] * y_hist[i];
    }
    if (m > 0) {
      double gamma = s_hist[m - 1].dot(y_hist[m - 1]) / y_hist[m - 1].squaredNorm();
      q *= gamma;
    }
    for (int i = 0; i < m; ++i) {
      double beta = rho_hist[i] * y_hist[i].dot(q);
      q += (alpha[i] - beta) * s_hist[i];
    }

    double dir_deriv = g.dot(q);
    if (!(dir_deriv < 0.0)) {  // not a descent direction; restart from steepest descent
      q = -g;
      dir_deriv = -gnorm * gnorm;
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }

    // Armijo backtracking.
    double step = 1.0;
    double f_new = f;
    Eigen::VectorXd x_new;
    bool accepted = false;
    for (int ls = 0; ls < opt.max_line_search_steps; ++ls) {
      x_new = x + step * q;
      f_new = objective(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= f + opt.armijo_c1 * step * dir_deriv) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // Objective is locally flat along every tried step; treat as converged
      // if the gradient is already small, otherwise give up.
      result.converged = gnorm <= 10.0 * opt.gradient_tolerance;
      break;
    }

    Eigen::VectorXd s = x_new - x;
    Eigen::VectorXd y = g_new - g;
    double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > opt.history) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }

    double decrease = f - f_new;
    x.swap(x_new);
    g.swap(g_new);
    f = f_new;
    result.f_trace.push_back(f);

    if (decrease <= opt.f_tolerance * (std::abs(f) + 1.0)) {
      // Relative progress stalled; report convergence state via gradient norm.
      result.converged = g.norm() <= std::max(opt.gradient_tolerance, 1e-6);
      if (result.converged) break;
      // keep iterating: L-BFGS often stalls one step before a good move
      if (decrease == 0.0) break;
    }
  }

  result.x = std::move(x);
  result.f = f;
  result.gradient_norm = g.norm();
  result.iterations = iter;
  if (result.gradient_norm <= opt.gradient_tolerance) result.converged = true;
  return result;
}

}  // namespace fbq
