#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "trajas/portfolio.hpp"

using namespace trajas;
using bbob::ProblemInstance;

namespace {

bool traces_equal(const RunTrace& a, const RunTrace& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.values[i] != b.values[i]) return false;
    if (a.points[i] != b.points[i]) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("population size formula") {
  CHECK(cma_default_population_size(5) == 8);
  CHECK(cma_default_population_size(2) == 6);
  CHECK(cma_default_population_size(20) == 12);
}

TEST_CASE("determinism for fixed inputs") {
  ProblemInstance p({10, 1, 5});
  for (OptimizerKind k : kPortfolio) {
    CAPTURE(to_string(k));
    RunTrace a = run(k, p, 120, 77);
    RunTrace b = run(k, p, 120, 77);
    CHECK(traces_equal(a, b));
    RunTrace c = run(k, p, 120, 78);
    CHECK_FALSE(traces_equal(a, c));
  }
}

TEST_CASE("budget exactness, including tiny budgets") {
  ProblemInstance p({15, 2, 5});
  for (OptimizerKind k : kPortfolio) {
    CAPTURE(to_string(k));
    CHECK(run(k, p, 10, 3).size() == 10);
    CHECK(run(k, p, 153, 3).size() == 153);
  }
}

TEST_CASE("best_so_far monotonicity") {
  ProblemInstance p({21, 3, 5});
  for (OptimizerKind k : kPortfolio) {
    RunTrace t = run(k, p, 300, 5);
    for (std::size_t i = 1; i < t.size(); ++i)
      CHECK(t.best_so_far[i] <= t.best_so_far[i - 1]);
  }
}

TEST_CASE("BFGS solves the sphere from the origin within 200 evaluations") {
  ProblemInstance p({1, 1, 5});
  WarmStartSpec spec;
  spec.kind = OptimizerKind::BFGS;
  spec.initial_center = VectorXd::Zero(5);
  RunTrace t = run(OptimizerKind::BFGS, p, 200, 1, &spec);
  CHECK(p.target_precision(t.best_value()) < 1e-8);
}

TEST_CASE("forward-difference gradient") {
  auto sq = [](const VectorXd& x) { return x.squaredNorm(); };
  VectorXd x = VectorXd::Zero(5);
  x[0] = 1.0;
  const double h = std::sqrt(std::numeric_limits<double>::epsilon());
  VectorXd g = bfgs_gradient(sq, x, sq(x));
  CHECK(g[0] == doctest::Approx(2.0 + h).epsilon(1e-6));
  for (int i = 1; i < 5; ++i) CHECK(g[i] == doctest::Approx(h).epsilon(1e-6));

  auto constant = [](const VectorXd&) { return 3.5; };
  VectorXd gz = bfgs_gradient(constant, x, 3.5);
  CHECK(gz.norm() == 0.0);

  // random point on f1, against a central-difference oracle
  ProblemInstance p({1, 2, 5});
  auto fp = [&p](const VectorXd& v) { return p.evaluate_raw(v); };
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  VectorXd xr(5);
  for (int i = 0; i < 5; ++i) xr[i] = u(rng);
  VectorXd gf = bfgs_gradient(fp, xr, fp(xr));
  for (int i = 0; i < 5; ++i) {
    const double hc = 1e-6 * std::max(1.0, std::abs(xr[i]));
    VectorXd a = xr, b = xr;
    a[i] += hc;
    b[i] -= hc;
    const double central = (fp(a) - fp(b)) / (2.0 * hc);
    CHECK(gf[i] == doctest::Approx(central).epsilon(1e-4));
  }
}

TEST_CASE("PSO velocity clipping bounds per-step movement") {
  std::mt19937_64 seeds(123);
  for (int r = 0; r < 100; ++r) {
    const int fid = 1 + static_cast<int>(seeds() % 24);
    ProblemInstance p({fid, 1, 5});
    RunTrace t = run(OptimizerKind::PSO, p, 150, seeds());
    // particle i is re-evaluated every kPsoPopulation evaluations
    for (std::size_t i = kPsoPopulation; i < t.size(); ++i) {
      const VectorXd step = t.points[i] - t.points[i - kPsoPopulation];
      for (int j = 0; j < 5; ++j)
        CHECK(std::abs(step[j]) <= kPsoVMax + 1e-12);
    }
  }
}

TEST_CASE("CMA-ES covariance stays positive definite") {
  for (int fid : {1, 6, 16, 23}) {
    ProblemInstance p({fid, 1, 5});
    CmaState st;
    run(OptimizerKind::CMAES, p, 400, 11, nullptr, &st);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(st.C);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    CHECK(st.sigma > 0.0);
    CHECK(st.lambda >= 4);
  }
}

TEST_CASE("CMA-ES candidates are saturated to the domain") {
  ProblemInstance p({5, 1, 5});  // linear slope pushes towards the boundary
  RunTrace t = run(OptimizerKind::CMAES, p, 400, 2);
  for (const auto& x : t.points)
    for (int j = 0; j < 5; ++j) {
      CHECK(x[j] >= bbob::kLowerBound);
      CHECK(x[j] <= bbob::kUpperBound);
    }
}

TEST_CASE("invalid budget rejected") {
  ProblemInstance p({1, 1, 5});
  CHECK_THROWS_AS(run(OptimizerKind::DE, p, 0, 1), std::invalid_argument);
}
