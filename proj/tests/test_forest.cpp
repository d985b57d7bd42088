#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "trajas/forest.hpp"

using namespace trajas;

namespace {

// exhaustive split search used as an oracle: weighted child cost, identical
// candidate thresholds (midpoints between consecutive distinct values)
struct BruteSplit {
  int feature = -1;
  double threshold = 0.0;
  double cost = std::numeric_limits<double>::infinity();
};

BruteSplit brute_force_root(const MatrixXd& X, const VectorXd& y,
                            SplitCriterion crit) {
  BruteSplit best;
  const int n = static_cast<int>(X.rows());
  for (int feat = 0; feat < X.cols(); ++feat) {
    std::vector<double> vals(n);
    for (int i = 0; i < n; ++i) vals[i] = X(i, feat);
    std::vector<double> uniq(vals);
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    for (std::size_t u = 1; u < uniq.size(); ++u) {
      const double thr = 0.5 * (uniq[u - 1] + uniq[u]);
      std::vector<double> ly, ry;
      for (int i = 0; i < n; ++i) (vals[i] <= thr ? ly : ry).push_back(y[i]);
      const double cost = forest_detail::node_cost(crit, ly) +
                          forest_detail::node_cost(crit, ry);
      if (cost < best.cost) {
        best = {feat, thr, cost};
      }
    }
  }
  return best;
}

std::vector<int> all_rows(int n) {
  std::vector<int> r(n);
  std::iota(r.begin(), r.end(), 0);
  return r;
}

}  // namespace

TEST_CASE("textbook single-feature split") {
  MatrixXd X(4, 1);
  X << 0, 1, 2, 3;
  VectorXd y(4);
  y << 0, 1, 2, 3;
  TreeHyper h;
  h.max_depth = 1;
  RegressionTree t;
  t.fit(X, y, all_rows(4), h, 0);
  REQUIRE(t.nodes().size() == 3);
  const TreeNode& root = t.nodes()[0];
  CHECK(root.feature == 0);
  CHECK(root.threshold > 1.0);
  CHECK(root.threshold < 2.0);
  CHECK(t.nodes()[root.left].value == doctest::Approx(0.5));
  CHECK(t.nodes()[root.right].value == doctest::Approx(2.5));
}

TEST_CASE("constant targets give a single leaf") {
  MatrixXd X = MatrixXd::Random(10, 3);
  VectorXd y = VectorXd::Constant(10, 7.25);
  RegressionTree t;
  t.fit(X, y, all_rows(10), TreeHyper{}, 3);
  REQUIRE(t.nodes().size() == 1);
  CHECK(t.predict(X.row(4)) == 7.25);
}

TEST_CASE("depth 0 rejected, unbounded and >=1 accepted") {
  TreeHyper h;
  h.max_depth = 0;
  CHECK_THROWS_AS(h.validate(), std::invalid_argument);
  h.max_depth = -2;
  CHECK_THROWS_AS(h.validate(), std::invalid_argument);
  h.max_depth = -1;
  CHECK_NOTHROW(h.validate());
  h.max_depth = 1;
  CHECK_NOTHROW(h.validate());
}

TEST_CASE("poisson rejects negative targets") {
  MatrixXd X = MatrixXd::Random(8, 2);
  VectorXd y = VectorXd::Constant(8, 1.0);
  y[3] = -0.5;
  TreeHyper h;
  h.criterion = SplitCriterion::Poisson;
  RegressionTree t;
  CHECK_THROWS_AS(t.fit(X, y, all_rows(8), h, 0), std::invalid_argument);
}

TEST_CASE("root split matches exhaustive brute force on 100 random datasets") {
  std::mt19937_64 rng(2024);
  const SplitCriterion crits[] = {SplitCriterion::SquaredError,
                                  SplitCriterion::AbsoluteError,
                                  SplitCriterion::Poisson};
  int mismatches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 4 + static_cast<int>(rng() % 17);   // 4..20 rows
    const int p = 1 + static_cast<int>(rng() % 3);    // 1..3 features
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    MatrixXd X(n, p);
    VectorXd y(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < p; ++j) X(i, j) = u(rng);
      y[i] = std::abs(u(rng)) + 0.3 * X(i, 0);  // keep targets mostly varied
    }
    y = (y.array() - y.minCoeff()).matrix();  // nonnegative for Poisson
    for (SplitCriterion crit : crits) {
      TreeHyper h;
      h.max_depth = 1;
      h.criterion = crit;
      RegressionTree t;
      t.fit(X, y, all_rows(n), h, 5 * trial);
      BruteSplit oracle = brute_force_root(X, y, crit);
      if (oracle.feature < 0) {
        if (t.nodes()[0].feature != -1) ++mismatches;
        continue;
      }
      const TreeNode& root = t.nodes()[0];
      std::vector<double> ly, ry;
      for (int i = 0; i < n; ++i)
        (X(i, root.feature) <= root.threshold ? ly : ry).push_back(y[i]);
      const double got_cost = forest_detail::node_cost(crit, ly) +
                              forest_detail::node_cost(crit, ry);
      // equal-cost alternatives are fine; the achieved cost must be optimal
      if (std::abs(got_cost - oracle.cost) >
          1e-9 * std::max(1.0, std::abs(oracle.cost)))
        ++mismatches;
    }
  }
  CHECK(mismatches == 0);
}

TEST_CASE("degenerate ensemble equals a single tree") {
  MatrixXd X = MatrixXd::Random(30, 4);
  VectorXd y = X.col(0) + X.col(1).cwiseProduct(X.col(2));
  TreeHyper h;
  h.n_estimators = 1;
  h.max_depth = 1;
  RandomForest f;
  f.fit(X, y, h, 99, /*bootstrap=*/false);
  RegressionTree t;
  const std::uint64_t tree_seed = 99 * 0x9e3779b97f4a7c15ULL + 1;
  t.fit(X, y, all_rows(30), h, tree_seed ^ 0xabcdef12345ULL);
  for (int i = 0; i < 30; ++i)
    CHECK(f.predict(X.row(i)) == t.predict(X.row(i)));
}

TEST_CASE("forest determinism for a fixed seed") {
  MatrixXd X = MatrixXd::Random(60, 5);
  VectorXd y = X.rowwise().squaredNorm();
  TreeHyper h;
  h.n_estimators = 25;
  h.max_features = MaxFeatures::Sqrt;
  RandomForest a, b;
  a.fit(X, y, h, 7);
  b.fit(X, y, h, 7);
  MatrixXd probe = MatrixXd::Random(20, 5);
  for (int i = 0; i < 20; ++i)
    CHECK(a.predict(probe.row(i)) == b.predict(probe.row(i)));
  RandomForest c;
  c.fit(X, y, h, 8);
  bool any_diff = false;
  for (int i = 0; i < 20; ++i)
    if (c.predict(probe.row(i)) != a.predict(probe.row(i))) any_diff = true;
  CHECK(any_diff);
}

TEST_CASE("deep forest fits a smooth synthetic target with R^2 > 0.95") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const int n = 200;
  MatrixXd X(n, 3);
  VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 3; ++j) X(i, j) = u(rng);
    y[i] = std::sin(X(i, 0)) + X(i, 1) * X(i, 1) - 0.5 * X(i, 2);
  }
  TreeHyper h;
  h.n_estimators = 1000;
  h.max_depth = -1;
  RandomForest f;
  f.fit(X, y, h, 5);
  VectorXd pred = f.predict_all(X);
  const double ss_tot = (y.array() - y.mean()).square().sum();
  const double ss_res = (y - pred).array().square().sum();
  CHECK(1.0 - ss_res / ss_tot > 0.95);
}

TEST_CASE("prediction variance over seeds shrinks with more trees") {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const int n = 80;
  MatrixXd X(n, 3);
  VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 3; ++j) X(i, j) = u(rng);
    y[i] = X(i, 0) * X(i, 1) + std::cos(X(i, 2));
  }
  Eigen::RowVectorXd probe(3);
  probe << 0.3, -0.7, 1.1;
  auto spread = [&](int n_estimators) {
    std::vector<double> preds;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      TreeHyper h;
      h.n_estimators = n_estimators;
      h.max_features = MaxFeatures::Sqrt;
      RandomForest f;
      f.fit(X, y, h, seed);
      preds.push_back(f.predict(probe));
    }
    double m = 0.0;
    for (double v : preds) m += v;
    m /= preds.size();
    double s = 0.0;
    for (double v : preds) s += (v - m) * (v - m);
    return s / (preds.size() - 1);
  };
  CHECK(spread(1000) < spread(100));
}

TEST_CASE("json round trip preserves predictions") {
  MatrixXd X = MatrixXd::Random(40, 4);
  VectorXd y = X.col(0).array().abs() + X.col(3).array();
  TreeHyper h;
  h.n_estimators = 10;
  h.max_depth = 8;
  RandomForest f;
  f.fit(X, y, h, 77);
  RandomForest g = RandomForest::from_json(f.to_json());
  for (int i = 0; i < 40; ++i)
    CHECK(f.predict(X.row(i)) == g.predict(X.row(i)));
}
