// Standard (mu/mu_w, lambda) CMA-ES with saturation boundary correction.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "trajas/trace.hpp"

namespace trajas {

struct CmaState {
  VectorXd mean;
  double sigma = 0.0;
  Eigen::MatrixXd C;
  VectorXd p_sigma;
  VectorXd p_c;
  int lambda = 0;
  long generation = 0;
};

inline int cma_default_population_size(int dim) {
  return 4 + static_cast<int>(std::floor(3.0 * std::log(dim)));
}

inline constexpr double kCmaInitialSigma = 2.0;

namespace detail {

// Floors eigenvalues so C stays symmetric positive-definite.
inline void repair_spd(Eigen::MatrixXd& C, double floor_val = 1e-14) {
  C = 0.5 * (C + C.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
  VectorXd ev = es.eigenvalues();
  bool dirty = false;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (!std::isfinite(ev[i]) || ev[i] < floor_val) {
      ev[i] = floor_val;
      dirty = true;
    }
  }
  if (dirty)
    C = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

inline VectorXd clamp_to_domain(VectorXd x) {
  for (Eigen::Index i = 0; i < x.size(); ++i)
    x[i] = std::clamp(x[i], bbob::kLowerBound, bbob::kUpperBound);
  return x;
}

}  // namespace detail

// Runs until the budget throws BudgetExhausted. If final_state is given it
// holds the strategy state as of the last fully evaluated generation.
inline void run_cmaes(TracedProblem& f, std::uint64_t seed,
                      const VectorXd* center, CmaState* final_state) {
  const int d = f.dimension();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> uni(-4.0, 4.0);

  const int lambda = cma_default_population_size(d);
  const int mu = lambda / 2;
  VectorXd weights(mu);
  for (int i = 0; i < mu; ++i)
    weights[i] = std::log((lambda + 1) / 2.0) - std::log(i + 1.0);
  weights /= weights.sum();
  const double mueff = 1.0 / weights.squaredNorm();

  const double c_sigma = (mueff + 2.0) / (d + mueff + 5.0);
  const double d_sigma =
      1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (d + 1.0)) - 1.0) +
      c_sigma;
  const double c_c = (4.0 + mueff / d) / (d + 4.0 + 2.0 * mueff / d);
  const double c_1 = 2.0 / ((d + 1.3) * (d + 1.3) + mueff);
  const double c_mu = std::min(
      1.0 - c_1, 2.0 * (mueff - 2.0 + 1.0 / mueff) / ((d + 2.0) * (d + 2.0) + mueff));
  const double chi_n =
      std::sqrt(static_cast<double>(d)) *
      (1.0 - 1.0 / (4.0 * d) + 1.0 / (21.0 * d * d));

  CmaState st;
  if (center) {
    st.mean = *center;
  } else {
    st.mean = VectorXd(d);
    for (int i = 0; i < d; ++i) st.mean[i] = uni(rng);
  }
  st.sigma = kCmaInitialSigma;
  st.C = Eigen::MatrixXd::Identity(d, d);
  st.p_sigma = VectorXd::Zero(d);
  st.p_c = VectorXd::Zero(d);
  st.lambda = lambda;
  st.generation = 0;

  if (final_state) *final_state = st;

  std::vector<VectorXd> xs(lambda), ys(lambda);
  std::vector<double> fs(lambda);
  std::vector<int> order(lambda);

  for (;;) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(st.C);
    VectorXd ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i)
      if (!std::isfinite(ev[i]) || ev[i] < 1e-14) ev[i] = 1e-14;
    const Eigen::MatrixXd B = es.eigenvectors();
    const VectorXd sqrt_ev = ev.cwiseSqrt();

    for (int k = 0; k < lambda; ++k) {
      VectorXd z(d);
      for (int i = 0; i < d; ++i) z[i] = gauss(rng);
      VectorXd x = st.mean + st.sigma * (B * sqrt_ev.cwiseProduct(z));
      x = detail::clamp_to_domain(std::move(x));
      fs[k] = f(x);  // may throw BudgetExhausted mid-generation
      xs[k] = std::move(x);
      ys[k] = (xs[k] - st.mean) / st.sigma;
    }

    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&fs](int a, int b) { return fs[a] < fs[b]; });

    VectorXd y_w = VectorXd::Zero(d);
    for (int i = 0; i < mu; ++i) y_w += weights[i] * ys[order[i]];
    st.mean += st.sigma * y_w;

    // C^(-1/2) * y_w via the eigendecomposition of the sampling covariance
    const VectorXd c_inv_half_yw =
        B * (B.transpose() * y_w).cwiseQuotient(sqrt_ev);
    st.p_sigma = (1.0 - c_sigma) * st.p_sigma +
                 std::sqrt(c_sigma * (2.0 - c_sigma) * mueff) * c_inv_half_yw;

    const double ps_norm = st.p_sigma.norm();
    const bool hsig =
        ps_norm / std::sqrt(1.0 - std::pow(1.0 - c_sigma,
                                           2.0 * (st.generation + 1))) /
            chi_n <
        1.4 + 2.0 / (d + 1.0);

    st.p_c = (1.0 - c_c) * st.p_c +
             (hsig ? std::sqrt(c_c * (2.0 - c_c) * mueff) : 0.0) * y_w;

    Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < mu; ++i)
      rank_mu += weights[i] * ys[order[i]] * ys[order[i]].transpose();
    const double delta_hsig = (1.0 - (hsig ? 1.0 : 0.0)) * c_c * (2.0 - c_c);
    st.C = (1.0 - c_1 - c_mu) * st.C +
           c_1 * (st.p_c * st.p_c.transpose() + delta_hsig * st.C) +
           c_mu * rank_mu;
    detail::repair_spd(st.C);

    st.sigma *= std::exp(c_sigma / d_sigma * (ps_norm / chi_n - 1.0));
    if (!std::isfinite(st.sigma) || st.sigma <= 0.0) st.sigma = 1e-12;
    st.sigma = std::min(st.sigma, 1e4);

    ++st.generation;
    if (final_state) *final_state = st;
  }
}

}  // namespace trajas
