#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "trajas/features.hpp"

using namespace trajas;

namespace {

SampleSet random_set(std::uint64_t seed, int n = 150, int d = 5) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  SampleSet s;
  s.X = MatrixXd(n, d);
  s.y = VectorXd(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) s.X(i, j) = u(rng);
    s.y[i] = s.X.row(i).squaredNorm();
  }
  return s;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("schema is stable and complete") {
  const auto& a = feature_schema();
  const auto& b = feature_schema();
  CHECK(a == b);
  CHECK(a.size() >= 30);
  CHECK(std::find(a.begin(), a.end(), "ela_meta.lin_simple.adj_r2") != a.end());
  FeatureVector fv = compute_features(random_set(1));
  CHECK(fv.names == a);
  CHECK(fv.values.size() == a.size());
}

TEST_CASE("determinism") {
  FeatureVector a = compute_features(random_set(7));
  FeatureVector b = compute_features(random_set(7));
  CHECK(a.values == b.values);
}

TEST_CASE("linear target gives adjusted R^2 of 1") {
  SampleSet s = random_set(3);
  VectorXd w(5);
  w << 1.0, -2.0, 0.5, 3.0, -1.5;
  s.y = s.X * w + VectorXd::Constant(150, 4.0);
  FeatureVector fv = compute_features(s);
  CHECK(fv.at("ela_meta.lin_simple.adj_r2") == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fv.at("ela_meta.lin_simple.intercept") == doctest::Approx(4.0));
}

TEST_CASE("symmetric values give zero skewness") {
  SampleSet s = random_set(5, 150, 5);
  // construct y symmetric about its mean
  for (int i = 0; i < 75; ++i) {
    s.y[i] = static_cast<double>(i + 1);
    s.y[149 - i] = -static_cast<double>(i + 1);
  }
  FeatureVector fv = compute_features(s);
  CHECK(std::abs(fv.at("ela_distr.skewness")) < 1e-9);
}

TEST_CASE("y-shift invariance and scale behaviour") {
  SampleSet s = random_set(11);
  FeatureVector base = compute_features(s);
  SampleSet shifted = s;
  shifted.y.array() += 123.456;
  FeatureVector sh = compute_features(shifted);
  for (const char* name :
       {"ela_distr.skewness", "ela_distr.kurtosis", "disp.ratio_mean_05",
        "disp.ratio_median_25", "nbc.nn_nb.cor"})
    CHECK(sh.at(name) == doctest::Approx(base.at(name)).epsilon(1e-9));
  CHECK(sh.at("ela_meta.lin_simple.intercept") !=
        doctest::Approx(base.at("ela_meta.lin_simple.intercept")));

  SampleSet scaled = s;
  scaled.y *= 3.7;
  FeatureVector sc = compute_features(scaled);
  CHECK(sc.at("ela_distr.skewness") ==
        doctest::Approx(base.at("ela_distr.skewness")).epsilon(1e-9));
  CHECK(sc.at("ela_meta.lin_simple.adj_r2") ==
        doctest::Approx(base.at("ela_meta.lin_simple.adj_r2")).epsilon(1e-9));
}

TEST_CASE("constant y is imputed, never NaN") {
  SampleSet s = random_set(13);
  s.y.setConstant(2.0);
  FeatureVector fv = compute_features(s);
  for (double v : fv.values) CHECK(std::isfinite(v));
}

TEST_CASE("too-small sample set rejected") {
  SampleSet s = random_set(1, 5, 5);  // n = D < D+2
  CHECK_THROWS_AS(compute_features(s), std::invalid_argument);
}

TEST_CASE("golden agreement with the reference implementation within 5%") {
  const std::string dir = std::string(TRAJAS_SOURCE_DIR) + "/data/golden/";
  auto sample_rows = read_csv(dir + "ela_samples.csv");
  auto feature_rows = read_csv(dir + "ela_features.csv");
  REQUIRE(sample_rows.size() > 1);
  REQUIRE(feature_rows.size() > 1);

  std::map<int, SampleSet> sets;
  std::map<int, int> counts;
  for (std::size_t r = 1; r < sample_rows.size(); ++r)
    counts[std::stoi(sample_rows[r][0])]++;
  for (const auto& [k, n] : counts) {
    sets[k].X = MatrixXd(n, 5);
    sets[k].y = VectorXd(n);
  }
  for (std::size_t r = 1; r < sample_rows.size(); ++r) {
    const auto& row = sample_rows[r];
    const int k = std::stoi(row[0]);
    const int i = std::stoi(row[1]);
    for (int j = 0; j < 5; ++j) sets[k].X(i, j) = std::stod(row[2 + j]);
    sets[k].y[i] = std::stod(row[7]);
  }
  CHECK(sets.size() == 10);

  std::map<int, FeatureVector> computed;
  for (const auto& [k, s] : sets) computed[k] = compute_features(s);

  int checked = 0;
  for (std::size_t r = 1; r < feature_rows.size(); ++r) {
    const auto& row = feature_rows[r];
    const int k = std::stoi(row[0]);
    const double expect = std::stod(row[2]);
    const double got = computed[k].at(row[1]);
    CAPTURE(k);
    CAPTURE(row[1]);
    CHECK(std::abs(got - expect) <= 0.05 * std::abs(expect) + 1e-9);
    ++checked;
  }
  CHECK(checked == 10 * static_cast<int>(feature_schema().size()));
}
