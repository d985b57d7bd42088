// Performance regression: datasets, leave-one-group-out evaluation, and
// nested grid search over random-forest hyperparameters.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "trajas/forest.hpp"
#include "trajas/trace.hpp"

namespace trajas {

constexpr double kPrecisionFloor = 1e-8;

enum class TargetType { Raw, Log10 };

inline const char* to_string(TargetType t) {
  return t == TargetType::Raw ? "raw" : "log10";
}

inline double floored_log10(double precision) {
  return std::log10(std::max(precision, kPrecisionFloor));
}

struct Dataset {
  MatrixXd X;
  VectorXd y;                 // already transformed per target_type
  std::vector<int> groups;    // instance id per row
  std::vector<int> function_id;
  std::vector<int> repetition;
  TargetType target_type = TargetType::Log10;

  void validate() const {
    const auto n = static_cast<std::size_t>(X.rows());
    if (n == 0) throw std::invalid_argument("empty dataset");
    if (static_cast<std::size_t>(y.size()) != n || groups.size() != n)
      throw std::invalid_argument("dataset row counts disagree");
  }
};

struct HyperGrid {
  std::vector<int> n_estimators{100, 500, 1000};
  std::vector<MaxFeatures> max_features{MaxFeatures::All, MaxFeatures::Sqrt,
                                        MaxFeatures::Log2};
  std::vector<int> max_depth{4, 8, 15, -1};
  std::vector<int> min_samples_split{2, 5, 10};
  std::vector<SplitCriterion> criteria{SplitCriterion::SquaredError,
                                       SplitCriterion::AbsoluteError,
                                       SplitCriterion::Poisson};

  // Poisson splits need nonnegative targets, so that criterion is dropped
  // (not errored) when the target vector contains negatives.
  std::vector<TreeHyper> expand(bool targets_nonnegative) const {
    std::vector<TreeHyper> out;
    for (int ne : n_estimators)
      for (MaxFeatures mf : max_features)
        for (int md : max_depth)
          for (int ms : min_samples_split)
            for (SplitCriterion cr : criteria) {
              if (cr == SplitCriterion::Poisson && !targets_nonnegative)
                continue;
              TreeHyper h;
              h.n_estimators = ne;
              h.max_features = mf;
              h.max_depth = md;
              h.min_samples_split = ms;
              h.criterion = cr;
              h.validate();
              out.push_back(h);
            }
    if (out.empty())
      throw std::invalid_argument("hyperparameter grid is empty");
    return out;
  }
};

struct Fold {
  std::vector<int> train;
  std::vector<int> test;
  int test_group = -1;
};

inline std::vector<Fold> logo_folds(const std::vector<int>& groups,
                                    int expected_groups = 5) {
  std::set<int> distinct(groups.begin(), groups.end());
  if (static_cast<int>(distinct.size()) != expected_groups) {
    std::ostringstream os;
    os << "expected " << expected_groups << " distinct groups, found "
       << distinct.size();
    throw std::invalid_argument(os.str());
  }
  std::vector<Fold> folds;
  for (int g : distinct) {
    Fold f;
    f.test_group = g;
    for (std::size_t i = 0; i < groups.size(); ++i)
      (groups[i] == g ? f.test : f.train).push_back(static_cast<int>(i));
    if (f.train.empty())
      throw std::invalid_argument("a fold has an empty training side");
    folds.push_back(std::move(f));
  }
  return folds;
}

inline double r2(const VectorXd& predictions, const VectorXd& truths,
                 bool* constant_truths = nullptr) {
  if (predictions.size() != truths.size() || truths.size() == 0)
    throw std::invalid_argument("r2 needs equal nonzero lengths");
  const double mean = truths.mean();
  const double ss_tot = (truths.array() - mean).square().sum();
  if (constant_truths) *constant_truths = ss_tot == 0.0;
  if (ss_tot == 0.0) return 0.0;
  const double ss_res = (truths - predictions).array().square().sum();
  return 1.0 - ss_res / ss_tot;
}

struct CvReport {
  std::vector<double> fold_r2;
  double mean_r2 = 0.0;
  TreeHyper chosen;
  bool poisson_pruned = false;
  bool constant_truth_fold = false;
  OptimizerKind algorithm = OptimizerKind::CMAES;
  int budget = 0;
  TargetType target_type = TargetType::Log10;
};

struct GridSearchResult {
  TreeHyper best;
  CvReport report;
  VectorXd oof_predictions;  // out-of-fold prediction per dataset row
  RandomForest model;        // refit on the full dataset with `best`
};

namespace regression_detail {

// group-aware k-fold on a row subset; falls back to plain row k-fold when
// fewer than two distinct groups are present
inline std::vector<Fold> inner_folds(const std::vector<int>& rows,
                                     const std::vector<int>& groups,
                                     int k = 4) {
  std::set<int> distinct;
  for (int r : rows) distinct.insert(groups[r]);
  std::vector<Fold> folds;
  if (distinct.size() >= 2) {
    const int nf = std::min<int>(k, static_cast<int>(distinct.size()));
    std::map<int, int> assign;
    int next = 0;
    for (int g : distinct) assign[g] = next++ % nf;
    folds.resize(nf);
    for (int r : rows)
      for (int f = 0; f < nf; ++f)
        (assign[groups[r]] == f ? folds[f].test : folds[f].train).push_back(r);
  } else {
    const int nf = std::min<int>(k, static_cast<int>(rows.size()));
    folds.resize(nf);
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (int f = 0; f < nf; ++f)
        (static_cast<int>(i) % nf == f ? folds[f].test : folds[f].train)
            .push_back(rows[i]);
  }
  for (const Fold& f : folds)
    if (f.test.empty() || f.train.empty())
      throw std::runtime_error("degenerate inner fold");
  return folds;
}

inline void subset(const Dataset& ds, const std::vector<int>& rows,
                   MatrixXd& X, VectorXd& y) {
  X.resize(static_cast<Eigen::Index>(rows.size()), ds.X.cols());
  y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    X.row(static_cast<Eigen::Index>(i)) = ds.X.row(rows[i]);
    y[static_cast<Eigen::Index>(i)] = ds.y[rows[i]];
  }
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  a ^= b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2);
  return a;
}

}  // namespace regression_detail

// Nested evaluation: each outer LOGO fold runs a group-aware 4-fold inner CV
// over the grid on its training rows, picks the grid point with the best mean
// inner R², refits on the whole training fold, and scores the held-out group.
// The returned hyperparameters are the most frequent per-fold winner.
inline GridSearchResult grid_search(const Dataset& ds, const HyperGrid& grid,
                                    std::uint64_t seed,
                                    int expected_groups = 5) {
  ds.validate();
  const bool nonneg = ds.y.minCoeff() >= 0.0;
  const std::vector<TreeHyper> points = grid.expand(nonneg);
  const std::vector<Fold> outer = logo_folds(ds.groups, expected_groups);

  GridSearchResult res;
  res.report.poisson_pruned =
      !nonneg && std::find(grid.criteria.begin(), grid.criteria.end(),
                           SplitCriterion::Poisson) != grid.criteria.end();
  res.report.target_type = ds.target_type;
  res.oof_predictions = VectorXd::Zero(ds.X.rows());
  std::vector<std::size_t> winner_per_fold;

  for (std::size_t fi = 0; fi < outer.size(); ++fi) {
    const Fold& fold = outer[fi];
    const auto inner = regression_detail::inner_folds(fold.train, ds.groups);

    std::size_t best_point = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t gi = 0; gi < points.size(); ++gi) {
      double score_sum = 0.0;
      for (std::size_t ii = 0; ii < inner.size(); ++ii) {
        MatrixXd Xtr, Xte;
        VectorXd ytr, yte;
        regression_detail::subset(ds, inner[ii].train, Xtr, ytr);
        regression_detail::subset(ds, inner[ii].test, Xte, yte);
        RandomForest f;
        f.fit(Xtr, ytr, points[gi],
              regression_detail::mix(seed, 1000 * fi + 10 * gi + ii));
        score_sum += r2(f.predict_all(Xte), yte);
      }
      const double score = score_sum / inner.size();
      if (score > best_score) {
        best_score = score;
        best_point = gi;
      }
    }
    winner_per_fold.push_back(best_point);

    MatrixXd Xtr, Xte;
    VectorXd ytr, yte;
    regression_detail::subset(ds, fold.train, Xtr, ytr);
    regression_detail::subset(ds, fold.test, Xte, yte);
    RandomForest f;
    f.fit(Xtr, ytr, points[best_point],
          regression_detail::mix(seed, 777 + fi));
    const VectorXd pred = f.predict_all(Xte);
    bool constant = false;
    res.report.fold_r2.push_back(r2(pred, yte, &constant));
    res.report.constant_truth_fold |= constant;
    for (std::size_t i = 0; i < fold.test.size(); ++i)
      res.oof_predictions[fold.test[i]] = pred[static_cast<Eigen::Index>(i)];
  }

  double sum = 0.0;
  for (double v : res.report.fold_r2) sum += v;
  res.report.mean_r2 = sum / res.report.fold_r2.size();

  std::map<std::size_t, int> votes;
  for (std::size_t w : winner_per_fold) votes[w]++;
  std::size_t modal = winner_per_fold[0];
  int best_votes = 0;
  for (const auto& [idx, cnt] : votes)
    if (cnt > best_votes) {
      best_votes = cnt;
      modal = idx;
    }
  res.best = points[modal];
  res.report.chosen = res.best;
  RandomForest final_model;
  final_model.fit(ds.X, ds.y, res.best, regression_detail::mix(seed, 424242));
  res.model = std::move(final_model);
  return res;
}

// ---- train_all over the full (algorithm, budget, target) cube -------------

struct ModelKey {
  OptimizerKind algorithm;
  int budget;
  TargetType target_type;

  bool operator<(const ModelKey& o) const {
    if (algorithm != o.algorithm) return algorithm < o.algorithm;
    if (budget != o.budget) return budget < o.budget;
    return target_type < o.target_type;
  }

  std::string str() const {
    std::ostringstream os;
    os << to_string(algorithm) << "_" << budget << "_"
       << to_string(target_type);
    return os.str();
  }
};

// One row per (function, instance, repetition) triple; precision holds the
// achieved fixed-budget target precision per algorithm and A2 budget.
struct TrainInputs {
  MatrixXd features;
  std::vector<int> function_id;
  std::vector<int> instance_id;
  std::vector<int> repetition;
  std::map<std::pair<OptimizerKind, int>, VectorXd> precision;
};

struct TrainAllResult {
  std::map<ModelKey, GridSearchResult> models;
  std::vector<CvReport> reports;
};

inline TrainAllResult train_all(const TrainInputs& in, const HyperGrid& grid,
                                const std::vector<int>& budgets,
                                std::uint64_t seed, int expected_groups = 5) {
  const auto n = static_cast<std::size_t>(in.features.rows());
  if (n == 0) throw std::invalid_argument("no training rows");
  std::vector<std::string> gaps;
  for (OptimizerKind k : kPortfolio)
    for (int b : budgets) {
      auto it = in.precision.find({k, b});
      if (it == in.precision.end() ||
          static_cast<std::size_t>(it->second.size()) != n) {
        std::ostringstream os;
        os << to_string(k) << "@" << b;
        gaps.push_back(os.str());
      }
    }
  if (!gaps.empty()) {
    std::ostringstream os;
    os << "missing performance data for:";
    for (const auto& g : gaps) os << " " << g;
    throw std::invalid_argument(os.str());
  }

  TrainAllResult out;
  for (OptimizerKind k : kPortfolio)
    for (int b : budgets)
      for (TargetType t : {TargetType::Raw, TargetType::Log10}) {
        const VectorXd& prec = in.precision.at({k, b});
        Dataset ds;
        ds.X = in.features;
        ds.y.resize(prec.size());
        for (Eigen::Index i = 0; i < prec.size(); ++i)
          ds.y[i] = t == TargetType::Raw ? prec[i] : floored_log10(prec[i]);
        ds.groups = in.instance_id;
        ds.function_id = in.function_id;
        ds.repetition = in.repetition;
        ds.target_type = t;

        ModelKey key{k, b, t};
        std::uint64_t model_seed = seed;
        for (char c : key.str())
          model_seed = regression_detail::mix(model_seed,
                                              static_cast<std::uint64_t>(c));
        GridSearchResult gs = grid_search(ds, grid, model_seed,
                                          expected_groups);
        gs.report.algorithm = k;
        gs.report.budget = b;
        gs.report.target_type = t;
        out.reports.push_back(gs.report);
        out.models.emplace(key, std::move(gs));
      }
  return out;
}

}  // namespace trajas
