// Common entry point for the five optimizers: budget-counted, seeded,
// trace-logging, with optional warm start.
#pragma once

#include <stdexcept>

#include "trajas/optimizers/bfgs.hpp"
#include "trajas/optimizers/cmaes.hpp"
#include "trajas/optimizers/de.hpp"
#include "trajas/optimizers/mlsl.hpp"
#include "trajas/optimizers/pso.hpp"
#include "trajas/trace.hpp"
#include "trajas/warmstart.hpp"

namespace trajas {

// Runs `kind` for exactly budget_limit evaluations. The trace carries every
// evaluated point, including finite-difference and local-search evaluations.
inline RunTrace run(OptimizerKind kind, const bbob::ProblemInstance& inst,
                    long budget_limit, std::uint64_t seed,
                    const WarmStartSpec* init = nullptr,
                    CmaState* final_state = nullptr) {
  if (budget_limit <= 0) throw std::invalid_argument("budget must be positive");
  if (init && init->kind != kind)
    throw std::invalid_argument("warm-start spec built for a different kind");
  RunTrace trace;
  trace.meta.problem = inst.id();
  trace.meta.algorithm = to_string(kind);
  trace.meta.seed = seed;
  EvaluationBudget budget{0, budget_limit};
  TracedProblem f(inst, budget, trace);

  const VectorXd* center =
      init && init->initial_center.size() > 0 ? &init->initial_center : nullptr;
  try {
    switch (kind) {
      case OptimizerKind::CMAES:
        run_cmaes(f, seed, center, final_state);
        break;
      case OptimizerKind::DE:
        run_de(f, seed,
               init && init->initial_population ? &*init->initial_population
                                                : nullptr);
        break;
      case OptimizerKind::PSO:
        run_pso(f, seed,
                init && init->initial_population ? &*init->initial_population
                                                 : nullptr);
        break;
      case OptimizerKind::BFGS:
        run_bfgs(f, seed, center,
                 init && init->inverse_hessian ? &*init->inverse_hessian
                                               : nullptr);
        break;
      case OptimizerKind::MLSL:
        run_mlsl(f, seed, center);
        break;
    }
  } catch (const BudgetExhausted&) {
    // normal termination; partial populations are truncated at the boundary
  }
  return trace;
}

}  // namespace trajas
