// Budget-counted evaluation and run traces.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "trajas/bbob.hpp"

namespace trajas {

using Eigen::VectorXd;

// Thrown when a run has spent its evaluation budget; callers treat it as
// normal run termination.
struct BudgetExhausted {};

struct EvaluationBudget {
  long used = 0;
  long limit = 0;

  long remaining() const { return limit - used; }
};

enum class OptimizerKind { BFGS, CMAES, DE, MLSL, PSO };

inline const char* to_string(OptimizerKind k) {
  switch (k) {
    case OptimizerKind::BFGS: return "BFGS";
    case OptimizerKind::CMAES: return "CMAES";
    case OptimizerKind::DE: return "DE";
    case OptimizerKind::MLSL: return "MLSL";
    case OptimizerKind::PSO: return "PSO";
  }
  return "?";
}

inline OptimizerKind optimizer_from_string(const std::string& s) {
  if (s == "BFGS") return OptimizerKind::BFGS;
  if (s == "CMAES") return OptimizerKind::CMAES;
  if (s == "DE") return OptimizerKind::DE;
  if (s == "MLSL") return OptimizerKind::MLSL;
  if (s == "PSO") return OptimizerKind::PSO;
  throw std::invalid_argument("unknown optimizer: " + s);
}

inline constexpr OptimizerKind kPortfolio[] = {
    OptimizerKind::BFGS, OptimizerKind::CMAES, OptimizerKind::DE,
    OptimizerKind::MLSL, OptimizerKind::PSO};

struct TraceMeta {
  bbob::ProblemId problem;
  std::string algorithm;
  std::uint64_t seed = 0;
  int repetition = 0;
  // Index of the first post-switch sample; 0 for a standalone run.
  long phase_boundary = 0;
};

// Ordered evaluation history of a single run.
struct RunTrace {
  TraceMeta meta;
  std::vector<VectorXd> points;
  std::vector<double> values;
  std::vector<double> best_so_far;

  std::size_t size() const { return values.size(); }

  void append(const VectorXd& x, double y) {
    points.push_back(x);
    values.push_back(y);
    best_so_far.push_back(best_so_far.empty() ? y
                                              : std::min(best_so_far.back(), y));
  }

  double best_value() const {
    if (best_so_far.empty())
      throw std::logic_error("best_value on empty trace");
    return best_so_far.back();
  }

  std::size_t argmin() const {
    if (values.empty()) throw std::logic_error("argmin on empty trace");
    std::size_t k = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
      if (values[i] < values[k]) k = i;
    return k;
  }
};

// Counts every evaluation against the budget and logs it into the trace.
class TracedProblem {
 public:
  TracedProblem(const bbob::ProblemInstance& inst, EvaluationBudget& budget,
                RunTrace& trace)
      : inst_(inst), budget_(budget), trace_(trace) {}

  double operator()(const VectorXd& x) {
    if (budget_.used >= budget_.limit) throw BudgetExhausted{};
    ++budget_.used;
    const double y = inst_.evaluate_raw(x);
    trace_.append(x, y);
    return y;
  }

  const bbob::ProblemInstance& instance() const { return inst_; }
  long remaining() const { return budget_.remaining(); }
  int dimension() const { return inst_.id().dimension; }

 private:
  const bbob::ProblemInstance& inst_;
  EvaluationBudget& budget_;
  RunTrace& trace_;
};

}  // namespace trajas
