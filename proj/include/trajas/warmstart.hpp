// Switch-point capture and per-algorithm warm-start construction.
#pragma once

#include <Eigen/Dense>
#include <optional>
#include <random>
#include <stdexcept>

#include "trajas/optimizers/cmaes.hpp"
#include "trajas/optimizers/de.hpp"
#include "trajas/optimizers/pso.hpp"
#include "trajas/trace.hpp"

namespace trajas {

struct SwitchState {
  VectorXd best_x;
  double best_f = 0.0;
  VectorXd cma_mean;
  double cma_sigma = 0.0;
  Eigen::MatrixXd cma_C;
  long a1_length = 0;
};

struct WarmStartSpec {
  OptimizerKind kind = OptimizerKind::CMAES;
  VectorXd initial_center;
  std::optional<Eigen::MatrixXd> initial_population;
  std::optional<Eigen::MatrixXd> inverse_hessian;
};

inline SwitchState capture(const RunTrace& a1_trace, const CmaState& a1_state) {
  if (a1_trace.size() == 0)
    throw std::invalid_argument("cannot capture switch state from empty trace");
  SwitchState s;
  const std::size_t k = a1_trace.argmin();
  s.best_x = a1_trace.points[k];
  s.best_f = a1_trace.values[k];
  s.cma_mean = a1_state.mean;
  s.cma_sigma = a1_state.sigma;
  s.cma_C = a1_state.C;
  s.a1_length = static_cast<long>(a1_trace.size());
  return s;
}

namespace detail {

// Projects to the nearest SPD matrix by eigenvalue flooring.
inline Eigen::MatrixXd nearest_spd(const Eigen::MatrixXd& m,
                                   double floor_val = 1e-12) {
  Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  VectorXd ev = es.eigenvalues().cwiseMax(floor_val);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

inline Eigen::MatrixXd population_around(const VectorXd& center, double spread,
                                         int rows, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  const int d = static_cast<int>(center.size());
  Eigen::MatrixXd pop(rows, d);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < d; ++j)
      pop(i, j) = std::clamp(center[j] + spread * gauss(rng),
                             bbob::kLowerBound, bbob::kUpperBound);
  return pop;
}

}  // namespace detail

inline WarmStartSpec warm_start(OptimizerKind kind, const SwitchState& s,
                                std::uint64_t seed) {
  WarmStartSpec spec;
  spec.kind = kind;
  spec.initial_center = s.best_x;
  switch (kind) {
    case OptimizerKind::CMAES:
      // restart with default sigma and identity covariance; the captured
      // distribution shape is deliberately discarded
      break;
    case OptimizerKind::DE:
      spec.initial_population = detail::population_around(
          s.best_x, s.cma_sigma, kDePopulation, seed);
      break;
    case OptimizerKind::PSO:
      spec.initial_population = detail::population_around(
          s.best_x, s.cma_sigma, kPsoPopulation, seed);
      break;
    case OptimizerKind::BFGS:
      spec.inverse_hessian =
          detail::nearest_spd(s.cma_sigma * s.cma_sigma * s.cma_C);
      break;
    case OptimizerKind::MLSL:
      // best_x is injected into the first global sample batch
      break;
  }
  return spec;
}

}  // namespace trajas
