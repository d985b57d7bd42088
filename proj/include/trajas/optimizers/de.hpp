// Differential evolution, best/1/bin.
#pragma once

#include <Eigen/Dense>
#include <random>

#include "trajas/trace.hpp"

namespace trajas {

inline constexpr int kDePopulation = 15;
inline constexpr double kDeWeight = 0.8;
inline constexpr double kDeCrossover = 0.9;

inline void run_de(TracedProblem& f, std::uint64_t seed,
                   const Eigen::MatrixXd* init_pop) {
  const int d = f.dimension();
  const int np = kDePopulation;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni01(0.0, 1.0);
  std::uniform_real_distribution<double> dom(bbob::kLowerBound,
                                             bbob::kUpperBound);
  std::uniform_int_distribution<int> pick(0, np - 1);
  std::uniform_int_distribution<int> pick_dim(0, d - 1);

  Eigen::MatrixXd pop(np, d);
  if (init_pop) {
    pop = *init_pop;
  } else {
    for (int i = 0; i < np; ++i)
      for (int j = 0; j < d; ++j) pop(i, j) = dom(rng);
  }
  VectorXd fit(np);
  int best = 0;
  for (int i = 0; i < np; ++i) {
    fit[i] = f(pop.row(i).transpose());
    if (fit[i] < fit[best]) best = i;
  }

  for (;;) {
    for (int i = 0; i < np; ++i) {
      int r1 = pick(rng), r2 = pick(rng);
      while (r1 == i) r1 = pick(rng);
      while (r2 == i || r2 == r1) r2 = pick(rng);
      const int jrand = pick_dim(rng);
      VectorXd trial = pop.row(i).transpose();
      for (int j = 0; j < d; ++j) {
        if (j == jrand || uni01(rng) < kDeCrossover) {
          double v = pop(best, j) + kDeWeight * (pop(r1, j) - pop(r2, j));
          trial[j] = std::clamp(v, bbob::kLowerBound, bbob::kUpperBound);
        }
      }
      const double ft = f(trial);
      if (ft <= fit[i]) {
        pop.row(i) = trial.transpose();
        fit[i] = ft;
        if (ft < fit[best]) best = i;
      }
    }
  }
}

}  // namespace trajas
