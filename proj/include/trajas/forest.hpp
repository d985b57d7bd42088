// CART regression trees and bagged random forests.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

namespace trajas {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class SplitCriterion { SquaredError, AbsoluteError, Poisson };
enum class MaxFeatures { All, Sqrt, Log2 };

inline const char* to_string(SplitCriterion c) {
  switch (c) {
    case SplitCriterion::SquaredError: return "squared_error";
    case SplitCriterion::AbsoluteError: return "absolute_error";
    case SplitCriterion::Poisson: return "poisson";
  }
  return "?";
}

inline const char* to_string(MaxFeatures m) {
  switch (m) {
    case MaxFeatures::All: return "all";
    case MaxFeatures::Sqrt: return "sqrt";
    case MaxFeatures::Log2: return "log2";
  }
  return "?";
}

struct TreeHyper {
  int n_estimators = 100;
  MaxFeatures max_features = MaxFeatures::All;
  int max_depth = -1;  // -1 = unbounded
  int min_samples_split = 2;
  SplitCriterion criterion = SplitCriterion::SquaredError;

  void validate() const {
    if (max_depth == 0 || max_depth < -1)
      throw std::invalid_argument("max_depth must be -1 (unbounded) or >= 1");
    if (min_samples_split < 2)
      throw std::invalid_argument("min_samples_split must be >= 2");
    if (n_estimators < 1)
      throw std::invalid_argument("n_estimators must be >= 1");
  }
};

namespace forest_detail {

inline int feature_subset_size(MaxFeatures m, int p) {
  switch (m) {
    case MaxFeatures::All: return p;
    case MaxFeatures::Sqrt:
      return std::min(p, static_cast<int>(std::ceil(std::sqrt(p))));
    case MaxFeatures::Log2:
      return std::min(p, std::max(1, static_cast<int>(std::ceil(
                             std::log2(static_cast<double>(p))))));
  }
  return p;
}

// node cost (lower is better): variance * n, sum |y - median|, or Poisson
// deviance about the node mean
inline double node_cost(SplitCriterion c, std::vector<double> ys) {
  const std::size_t n = ys.size();
  if (n == 0) return 0.0;
  switch (c) {
    case SplitCriterion::SquaredError: {
      double m = 0.0;
      for (double v : ys) m += v;
      m /= n;
      double s = 0.0;
      for (double v : ys) s += (v - m) * (v - m);
      return s;
    }
    case SplitCriterion::AbsoluteError: {
      std::nth_element(ys.begin(), ys.begin() + n / 2, ys.end());
      double med = ys[n / 2];
      if (n % 2 == 0) {
        const double lo = *std::max_element(ys.begin(), ys.begin() + n / 2);
        med = 0.5 * (lo + med);
      }
      double s = 0.0;
      for (double v : ys) s += std::abs(v - med);
      return s;
    }
    case SplitCriterion::Poisson: {
      double m = 0.0;
      for (double v : ys) m += v;
      m /= n;
      if (m <= 0.0) return 0.0;
      double s = 0.0;
      for (double v : ys) {
        const double t = v > 0.0 ? v * std::log(v / m) : 0.0;
        s += 2.0 * (t - v + m);
      }
      return s;
    }
  }
  return 0.0;
}

}  // namespace forest_detail

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

class RegressionTree {
 public:
  void fit(const MatrixXd& X, const VectorXd& y,
           const std::vector<int>& rows, const TreeHyper& hyper,
           std::uint64_t seed) {
    hyper.validate();
    if (rows.empty()) throw std::invalid_argument("empty training set");
    if (hyper.criterion == SplitCriterion::Poisson)
      for (int r : rows)
        if (y[r] < 0.0)
          throw std::invalid_argument(
              "poisson criterion requires nonnegative targets");
    nodes_.clear();
    std::mt19937_64 rng(seed);
    build(X, y, rows, hyper, 0, rng);
  }

  double predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
    int i = 0;
    while (nodes_[i].feature >= 0)
      i = x[nodes_[i].feature] <= nodes_[i].threshold ? nodes_[i].left
                                                      : nodes_[i].right;
    return nodes_[i].value;
  }

  const std::vector<TreeNode>& nodes() const { return nodes_; }

  nlohmann::json to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& nd : nodes_)
      arr.push_back({nd.feature, nd.threshold, nd.left, nd.right, nd.value});
    return arr;
  }

  static RegressionTree from_json(const nlohmann::json& arr) {
    RegressionTree t;
    for (const auto& e : arr)
      t.nodes_.push_back({e[0].get<int>(), e[1].get<double>(),
                          e[2].get<int>(), e[3].get<int>(),
                          e[4].get<double>()});
    return t;
  }

 private:
  int build(const MatrixXd& X, const VectorXd& y, const std::vector<int>& rows,
            const TreeHyper& hyper, int depth, std::mt19937_64& rng) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    double mean = 0.0;
    for (int r : rows) mean += y[r];
    mean /= rows.size();
    nodes_[id].value = mean;

    const bool depth_ok = hyper.max_depth < 0 || depth < hyper.max_depth;
    if (!depth_ok ||
        rows.size() < static_cast<std::size_t>(hyper.min_samples_split))
      return id;
    bool constant = true;
    for (int r : rows)
      if (y[r] != y[rows[0]]) {
        constant = false;
        break;
      }
    if (constant) return id;

    const int p = static_cast<int>(X.cols());
    std::vector<int> feats(p);
    std::iota(feats.begin(), feats.end(), 0);
    const int k = forest_detail::feature_subset_size(hyper.max_features, p);
    if (k < p) {
      std::shuffle(feats.begin(), feats.end(), rng);
      feats.resize(k);
      std::sort(feats.begin(), feats.end());
    }

    int best_feat = -1;
    double best_thr = 0.0;
    double best_cost = std::numeric_limits<double>::infinity();
    std::vector<int> order(rows);
    std::vector<double> ly, ry;
    for (int feat : feats) {
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        return X(a, feat) < X(b, feat);
      });
      for (std::size_t cut = 1; cut < order.size(); ++cut) {
        if (X(order[cut - 1], feat) == X(order[cut], feat)) continue;
        const double thr =
            0.5 * (X(order[cut - 1], feat) + X(order[cut], feat));
        ly.clear();
        ry.clear();
        for (std::size_t i = 0; i < order.size(); ++i)
          (i < cut ? ly : ry).push_back(y[order[i]]);
        const double cost =
            forest_detail::node_cost(hyper.criterion, ly) +
            forest_detail::node_cost(hyper.criterion, ry);
        if (cost < best_cost) {
          best_cost = cost;
          best_feat = feat;
          best_thr = thr;
        }
      }
    }
    if (best_feat < 0) return id;  // no informative split available

    std::vector<int> left_rows, right_rows;
    for (int r : rows)
      (X(r, best_feat) <= best_thr ? left_rows : right_rows).push_back(r);
    nodes_[id].feature = best_feat;
    nodes_[id].threshold = best_thr;
    nodes_[id].left = build(X, y, left_rows, hyper, depth + 1, rng);
    nodes_[id].right = build(X, y, right_rows, hyper, depth + 1, rng);
    return id;
  }

  std::vector<TreeNode> nodes_;
};

class RandomForest {
 public:
  void fit(const MatrixXd& X, const VectorXd& y, const TreeHyper& hyper,
           std::uint64_t seed, bool bootstrap = true) {
    hyper.validate();
    hyper_ = hyper;
    trees_.clear();
    const int n = static_cast<int>(X.rows());
    std::vector<int> rows(n);
    for (int t = 0; t < hyper.n_estimators; ++t) {
      const std::uint64_t tree_seed =
          seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(t) + 1;
      if (bootstrap) {
        std::mt19937_64 rng(tree_seed);
        std::uniform_int_distribution<int> pick(0, n - 1);
        for (int i = 0; i < n; ++i) rows[i] = pick(rng);
      } else {
        std::iota(rows.begin(), rows.end(), 0);
      }
      RegressionTree tree;
      tree.fit(X, y, rows, hyper, tree_seed ^ 0xabcdef12345ULL);
      trees_.push_back(std::move(tree));
    }
  }

  double predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
    double s = 0.0;
    for (const auto& t : trees_) s += t.predict(x);
    return s / trees_.size();
  }

  VectorXd predict_all(const MatrixXd& X) const {
    VectorXd out(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) out[i] = predict(X.row(i));
    return out;
  }

  const std::vector<RegressionTree>& trees() const { return trees_; }
  const TreeHyper& hyper() const { return hyper_; }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["n_estimators"] = hyper_.n_estimators;
    j["max_features"] = to_string(hyper_.max_features);
    j["max_depth"] = hyper_.max_depth;
    j["min_samples_split"] = hyper_.min_samples_split;
    j["criterion"] = to_string(hyper_.criterion);
    j["trees"] = nlohmann::json::array();
    for (const auto& t : trees_) j["trees"].push_back(t.to_json());
    return j;
  }

  static RandomForest from_json(const nlohmann::json& j) {
    RandomForest f;
    f.hyper_.n_estimators = j["n_estimators"];
    f.hyper_.max_depth = j["max_depth"];
    f.hyper_.min_samples_split = j["min_samples_split"];
    for (const auto& t : j["trees"])
      f.trees_.push_back(RegressionTree::from_json(t));
    return f;
  }

 private:
  TreeHyper hyper_;
  std::vector<RegressionTree> trees_;
};

}  // namespace trajas
