// Multi-level single linkage: batches of uniform samples, reduced set of the
// best fraction, single-linkage clustering with a shrinking critical distance,
// BFGS local searches.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "trajas/optimizers/bfgs.hpp"
#include "trajas/trace.hpp"

namespace trajas {

struct MlslParams {
  int batch_per_dim = 10;        // uniform samples per phase = batch_per_dim * D
  double reduced_fraction = 0.1; // gamma: fraction of archive kept per phase
  double sigma = 2.0;            // critical-distance scale
  int local_evals_per_dim = 50;  // per-local-search evaluation cap = this * D
  int max_starts_per_phase = 3;
};

namespace detail {

inline double mlsl_critical_distance(const MlslParams& p, int dim, long kn) {
  // r_k = pi^{-1/2} * (Gamma(1 + D/2) * |Omega| * sigma * ln(kN) / (kN))^{1/D}
  const double volume =
      std::pow(bbob::kUpperBound - bbob::kLowerBound, dim);
  const double g = std::tgamma(1.0 + dim / 2.0);
  const double inner = g * volume * p.sigma * std::log(static_cast<double>(kn)) /
                       static_cast<double>(kn);
  return std::pow(inner, 1.0 / dim) / std::sqrt(M_PI);
}

}  // namespace detail

inline void run_mlsl(TracedProblem& f, std::uint64_t seed,
                     const VectorXd* inject, MlslParams params = {}) {
  const int d = f.dimension();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dom(bbob::kLowerBound,
                                             bbob::kUpperBound);

  std::vector<VectorXd> archive_x;
  std::vector<double> archive_f;
  std::vector<VectorXd> minima;  // local minima found so far
  const int batch = params.batch_per_dim * d;
  const long local_cap = static_cast<long>(params.local_evals_per_dim) * d;

  bool first = true;
  for (;;) {
    for (int k = 0; k < batch; ++k) {
      VectorXd x(d);
      if (first && k == 0 && inject) {
        x = *inject;
      } else {
        for (int i = 0; i < d; ++i) x[i] = dom(rng);
      }
      archive_f.push_back(f(x));
      archive_x.push_back(std::move(x));
    }
    first = false;

    const long kn = static_cast<long>(archive_x.size());
    const double r_k = detail::mlsl_critical_distance(params, d, kn);

    // reduced set: best gamma-fraction of the archive, by value
    const std::size_t keep = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(params.reduced_fraction * kn)));
    std::vector<int> idx(archive_x.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      return archive_f[a] < archive_f[b];
    });
    idx.resize(keep);

    int starts = 0;
    for (std::size_t i = 0; i < idx.size() && starts < params.max_starts_per_phase;
         ++i) {
      const VectorXd& cand = archive_x[idx[i]];
      // single linkage: skip when a better reduced point lies within r_k
      bool clustered = false;
      for (std::size_t j = 0; j < i; ++j) {
        if ((cand - archive_x[idx[j]]).norm() < r_k) {
          clustered = true;
          break;
        }
      }
      if (!clustered) {
        for (const VectorXd& m : minima) {
          if ((cand - m).norm() < r_k) {
            clustered = true;
            break;
          }
        }
      }
      if (clustered) continue;
      auto [mx, mf] = bfgs_minimize(f, cand, nullptr, local_cap);
      minima.push_back(mx);
      ++starts;
    }
  }
}

}  // namespace trajas
