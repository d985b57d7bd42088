#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "trajas/regression.hpp"

using namespace trajas;

namespace {

// synthetic dataset: 5 groups x 30 rows, smooth target with group-stable shape
Dataset synthetic(std::uint64_t seed, int groups = 5, int per_group = 30,
                  bool deep_target = false) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const int n = groups * per_group;
  Dataset ds;
  ds.X = MatrixXd(n, 4);
  ds.y = VectorXd(n);
  for (int g = 0; g < groups; ++g)
    for (int i = 0; i < per_group; ++i) {
      const int r = g * per_group + i;
      for (int j = 0; j < 4; ++j) ds.X(r, j) = u(rng);
      if (deep_target) {
        // needs several interacting splits; depth 4 underfits this
        double v = 0.0;
        for (int j = 0; j < 4; ++j) v += (ds.X(r, j) > 0.0) ? (1 << j) : 0;
        ds.y[r] = v + 0.01 * ds.X(r, 0);
      } else {
        ds.y[r] = ds.X(r, 0) + 0.5 * ds.X(r, 1) * ds.X(r, 1);
      }
      ds.groups.push_back(g + 1);
      ds.function_id.push_back(1);
      ds.repetition.push_back(i);
    }
  return ds;
}

}  // namespace

TEST_CASE("floored log10 target transform") {
  CHECK(floored_log10(1e-3) == doctest::Approx(-3.0));
  CHECK(floored_log10(1e-12) == doctest::Approx(-8.0));
  CHECK(floored_log10(0.0) == doctest::Approx(-8.0));
  CHECK(floored_log10(100.0) == doctest::Approx(2.0));
}

TEST_CASE("logo folds partition the rows by group") {
  std::vector<int> groups;
  for (int g = 1; g <= 5; ++g)
    for (int i = 0; i < 7; ++i) groups.push_back(g);
  auto folds = logo_folds(groups, 5);
  REQUIRE(folds.size() == 5);
  std::vector<int> seen(groups.size(), 0);
  for (const Fold& f : folds) {
    CHECK(f.test.size() == 7);
    CHECK(f.train.size() == 28);
    for (int r : f.test) {
      CHECK(groups[r] == f.test_group);
      seen[r]++;
    }
    // structural no-leakage check
    for (int r : f.test)
      CHECK(std::find(f.train.begin(), f.train.end(), r) == f.train.end());
  }
  for (int s : seen) CHECK(s == 1);
}

TEST_CASE("logo folds reject a wrong group count") {
  std::vector<int> groups = {1, 1, 2, 2, 3, 3, 4, 4};
  CHECK_THROWS_AS(logo_folds(groups, 5), std::invalid_argument);
  CHECK_NOTHROW(logo_folds(groups, 4));
}

TEST_CASE("r2 identities") {
  VectorXd y(5);
  y << 1, 2, 3, 4, 10;
  CHECK(r2(y, y) == 1.0);
  VectorXd mean_pred = VectorXd::Constant(5, y.mean());
  CHECK(r2(mean_pred, y) == 0.0);
  VectorXd noisy = y.array() + 100.0;
  CHECK(r2(noisy, y) < 0.0);
  bool flag = false;
  VectorXd constant = VectorXd::Constant(5, 3.0);
  CHECK(r2(y, constant, &flag) == 0.0);
  CHECK(flag);
  CHECK_THROWS_AS(r2(y, VectorXd::Zero(3)), std::invalid_argument);
}

TEST_CASE("grid expansion matches the documented defaults") {
  HyperGrid g;
  CHECK(g.expand(true).size() == 3 * 3 * 4 * 3 * 3);
  // poisson pruned when targets may be negative
  CHECK(g.expand(false).size() == 3 * 3 * 4 * 3 * 2);
  g.criteria = {SplitCriterion::Poisson};
  CHECK_THROWS_AS(g.expand(false), std::invalid_argument);
}

TEST_CASE("grid search with a single point returns that point") {
  Dataset ds = synthetic(5);
  HyperGrid g;
  g.n_estimators = {50};
  g.max_features = {MaxFeatures::All};
  g.max_depth = {8};
  g.min_samples_split = {2};
  g.criteria = {SplitCriterion::SquaredError};
  GridSearchResult res = grid_search(ds, g, 1, 5);
  CHECK(res.best.n_estimators == 50);
  CHECK(res.best.max_depth == 8);
  CHECK(res.report.fold_r2.size() == 5);
  CHECK(res.report.mean_r2 > 0.5);  // smooth target, plenty of data
  CHECK(res.oof_predictions.size() == ds.X.rows());
}

TEST_CASE("grid search prefers unbounded depth on a deep interaction target") {
  Dataset ds = synthetic(6, 5, 40, /*deep_target=*/true);
  HyperGrid g;
  g.n_estimators = {100};
  g.max_features = {MaxFeatures::All};
  g.max_depth = {2, -1};
  g.min_samples_split = {2};
  g.criteria = {SplitCriterion::SquaredError};
  GridSearchResult res = grid_search(ds, g, 3, 5);
  CHECK(res.best.max_depth == -1);
}

TEST_CASE("grid search is deterministic for a fixed seed") {
  Dataset ds = synthetic(9);
  HyperGrid g;
  g.n_estimators = {30};
  g.max_depth = {4, -1};
  g.min_samples_split = {2};
  g.criteria = {SplitCriterion::SquaredError};
  g.max_features = {MaxFeatures::Sqrt};
  GridSearchResult a = grid_search(ds, g, 11, 5);
  GridSearchResult b = grid_search(ds, g, 11, 5);
  CHECK(a.report.fold_r2 == b.report.fold_r2);
  CHECK(a.oof_predictions == b.oof_predictions);
}

TEST_CASE("train_all covers the full cube and flags gaps") {
  const int n = 40;  // 2 groups x 2 functions x 10 reps
  TrainInputs in;
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  in.features = MatrixXd(n, 3);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 3; ++j) in.features(i, j) = u(rng);
    in.function_id.push_back(i % 2 ? 1 : 2);
    in.instance_id.push_back(i < n / 2 ? 1 : 2);
    in.repetition.push_back(i % 10);
  }
  const std::vector<int> budgets = {100, 300};
  for (OptimizerKind k : kPortfolio)
    for (int b : budgets) {
      VectorXd prec(n);
      for (int i = 0; i < n; ++i)
        prec[i] = std::pow(10.0, -4.0 * in.features(i, 0)) + 1e-9;
      in.precision[{k, b}] = prec;
    }

  HyperGrid g;
  g.n_estimators = {20};
  g.max_features = {MaxFeatures::All};
  g.max_depth = {8};
  g.min_samples_split = {2};
  g.criteria = {SplitCriterion::SquaredError};
  TrainAllResult res = train_all(in, g, budgets, 99, /*expected_groups=*/2);
  CHECK(res.reports.size() == 5 * 2 * 2);  // algos x budgets x targets
  CHECK(res.models.size() == res.reports.size());
  for (const auto& [key, m] : res.models) {
    CHECK(m.report.fold_r2.size() == 2);
    CHECK(m.oof_predictions.size() == n);
  }

  in.precision.erase({OptimizerKind::PSO, 300});
  CHECK_THROWS_WITH_AS(train_all(in, g, budgets, 99, 2),
                       doctest::Contains("PSO@300"), std::invalid_argument);
}

TEST_CASE("poisson pruning is recorded for negative targets") {
  Dataset ds = synthetic(21);
  ds.y.array() -= ds.y.maxCoeff() + 1.0;  // force negatives
  HyperGrid g;
  g.n_estimators = {10};
  g.max_features = {MaxFeatures::All};
  g.max_depth = {4};
  g.min_samples_split = {2};
  g.criteria = {SplitCriterion::SquaredError, SplitCriterion::Poisson};
  GridSearchResult res = grid_search(ds, g, 2, 5);
  CHECK(res.report.poisson_pruned);
  CHECK(res.best.criterion == SplitCriterion::SquaredError);
}
