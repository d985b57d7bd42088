// BFGS with forward-difference gradients and backtracking-Armijo line search.
// Every gradient evaluation is counted against the run budget.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <random>

#include "trajas/trace.hpp"

namespace trajas {

// Forward-difference gradient; consumes D evaluations. fx is f at x.
template <class F>
VectorXd bfgs_gradient(F&& f, const VectorXd& x, double fx) {
  const int d = static_cast<int>(x.size());
  const double sqrt_eps = std::sqrt(std::numeric_limits<double>::epsilon());
  VectorXd g(d);
  for (int i = 0; i < d; ++i) {
    const double h = sqrt_eps * std::max(1.0, std::abs(x[i]));
    VectorXd xp = x;
    xp[i] += h;
    g[i] = (f(xp) - fx) / h;
  }
  return g;
}

// Minimizes from x0 until convergence or max_own_evals evaluations of this
// call are spent. Returns the best point seen by this local search.
template <class F>
std::pair<VectorXd, double> bfgs_minimize(F&& f, const VectorXd& x0,
                                          const Eigen::MatrixXd* h0,
                                          long max_own_evals) {
  const int d = static_cast<int>(x0.size());
  Eigen::MatrixXd H =
      h0 ? *h0 : Eigen::MatrixXd::Identity(d, d).eval();
  struct LocalStop {};  // own-budget cap reached, run budget still open
  long own = 0;
  auto eval = [&](const VectorXd& x) {
    if (own >= max_own_evals) throw LocalStop{};
    ++own;
    return f(x);
  };

  VectorXd x = x0;
  double fx;
  VectorXd best_x = x0;
  double best_f = std::numeric_limits<double>::infinity();
  try {
    fx = eval(x);
    best_x = x;
    best_f = fx;
    VectorXd g(d);
    {
      if (own + d > max_own_evals) throw LocalStop{};
      g = bfgs_gradient(f, x, fx);
      own += d;
    }
    const double c1 = 1e-4;
    for (int iter = 0;; ++iter) {
      if (g.norm() < 1e-12) break;
      VectorXd p = -(H * g);
      if (!p.allFinite() || p.dot(g) >= 0.0) {
        // fallback to steepest descent when the quasi-Newton direction breaks
        H = Eigen::MatrixXd::Identity(d, d);
        p = -g;
      }
      double alpha = 1.0;
      bool accepted = false;
      VectorXd x_new;
      double f_new = 0.0;
      for (int ls = 0; ls < 30; ++ls) {
        x_new = x + alpha * p;
        f_new = eval(x_new);
        if (std::isnan(f_new)) {
          alpha *= 0.5;
          continue;
        }
        if (f_new <= fx + c1 * alpha * g.dot(p)) {
          accepted = true;
          if (ls == 0) {
            // refine an immediately accepted unit step: the quadratic model
            // through (0, fx), the directional slope, and (alpha, f_new)
            // catches steps that overshoot past the minimizer
            const double slope = g.dot(p);
            const double denom = f_new - fx - slope * alpha;
            if (denom > 0.0) {
              const double a_star = -slope * alpha * alpha / (2.0 * denom);
              if (std::isfinite(a_star) && a_star > 0.0 &&
                  std::abs(a_star - alpha) > 0.05 * alpha) {
                const VectorXd x_try = x + a_star * p;
                const double f_try = eval(x_try);
                if (!std::isnan(f_try) && f_try < f_new) {
                  alpha = a_star;
                  x_new = x_try;
                  f_new = f_try;
                }
              }
            }
            // an under-scaled inverse Hessian shows up as unit steps that
            // keep descending; expand while the value keeps dropping
            for (int grow = 0; grow < 20; ++grow) {
              const VectorXd x_try = x + 2.0 * alpha * p;
              const double f_try = eval(x_try);
              if (std::isnan(f_try) || f_try >= f_new) break;
              alpha *= 2.0;
              x_new = x_try;
              f_new = f_try;
            }
          }
          break;
        }
        alpha *= 0.5;
      }
      if (f_new < best_f) {
        best_f = f_new;
        best_x = x_new;
      }
      if (!accepted) break;
      if (own + d > max_own_evals) throw LocalStop{};
      const VectorXd g_new = bfgs_gradient(f, x_new, f_new);
      own += d;
      const VectorXd s = x_new - x;
      const VectorXd y = g_new - g;
      const double sy = s.dot(y);
      // curvature condition; skip the update when violated
      if (sy > 1e-10 * s.norm() * y.norm()) {
        const double rho = 1.0 / sy;
        const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
        H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) +
            rho * s * s.transpose();
      }
      x = x_new;
      fx = f_new;
      g = g_new;
      if (s.norm() < 1e-13) break;
    }
  } catch (const LocalStop&) {
    return {best_x, best_f};
  }
  return {best_x, best_f};
}

// Full BFGS run. The first search starts from `center` with `h0` when given;
// the second polishes the best point found so far with a fresh identity
// Hessian (the inherited curvature can stall the final digits); later
// searches restart from random points until the run budget is exhausted.
inline void run_bfgs(TracedProblem& f, std::uint64_t seed,
                     const VectorXd* center, const Eigen::MatrixXd* h0) {
  const int d = f.dimension();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(bbob::kLowerBound,
                                             bbob::kUpperBound);
  VectorXd best_x;
  double best_f = std::numeric_limits<double>::infinity();
  for (int search = 0;; ++search) {
    VectorXd x0(d);
    const Eigen::MatrixXd* H0 = nullptr;
    long own_cap = std::numeric_limits<long>::max();
    if (search == 0 && center) {
      x0 = *center;
      H0 = h0;
      // reserve a slice of the budget for the identity-Hessian polish: a
      // poorly scaled inherited Hessian can otherwise crawl and starve it
      const long reserve = std::min<long>(30, f.remaining() / 2);
      own_cap = std::max<long>(1, f.remaining() - reserve);
    } else if (search == 1 && center && best_x.size() == d) {
      x0 = best_x;
    } else {
      for (int i = 0; i < d; ++i) x0[i] = uni(rng);
    }
    auto [bx, bf] = bfgs_minimize(f, x0, H0, own_cap);
    if (bf < best_f) {
      best_f = bf;
      best_x = bx;
    }
  }
}

}  // namespace trajas
