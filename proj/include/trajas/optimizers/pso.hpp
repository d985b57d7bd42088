// Particle swarm, global-best topology, clipped velocity.
#pragma once

#include <Eigen/Dense>
#include <random>

#include "trajas/trace.hpp"

namespace trajas {

inline constexpr int kPsoPopulation = 40;
inline constexpr double kPsoInertia = 0.72;
inline constexpr double kPsoCognitive = 1.49;
inline constexpr double kPsoSocial = 1.49;
// 20% of domain width
inline constexpr double kPsoVMax =
    0.2 * (bbob::kUpperBound - bbob::kLowerBound);

inline void run_pso(TracedProblem& f, std::uint64_t seed,
                    const Eigen::MatrixXd* init_pop) {
  const int d = f.dimension();
  const int n = kPsoPopulation;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni01(0.0, 1.0);
  std::uniform_real_distribution<double> dom(bbob::kLowerBound,
                                             bbob::kUpperBound);
  std::uniform_real_distribution<double> vel(-kPsoVMax, kPsoVMax);

  Eigen::MatrixXd x(n, d), v(n, d), pbest(n, d);
  VectorXd pbest_f(n);
  if (init_pop) {
    x = *init_pop;
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < d; ++j) x(i, j) = dom(rng);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) v(i, j) = vel(rng);

  int gbest = 0;
  for (int i = 0; i < n; ++i) {
    pbest_f[i] = f(x.row(i).transpose());
    pbest.row(i) = x.row(i);
    if (pbest_f[i] < pbest_f[gbest]) gbest = i;
  }

  for (;;) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) {
        const double r1 = uni01(rng), r2 = uni01(rng);
        double vij = kPsoInertia * v(i, j) +
                     kPsoCognitive * r1 * (pbest(i, j) - x(i, j)) +
                     kPsoSocial * r2 * (pbest(gbest, j) - x(i, j));
        v(i, j) = std::clamp(vij, -kPsoVMax, kPsoVMax);
        x(i, j) = std::clamp(x(i, j) + v(i, j), bbob::kLowerBound,
                             bbob::kUpperBound);
      }
      const double fi = f(x.row(i).transpose());
      if (fi < pbest_f[i]) {
        pbest_f[i] = fi;
        pbest.row(i) = x.row(i);
        if (fi < pbest_f[gbest]) gbest = i;
      }
    }
  }
}

}  // namespace trajas
