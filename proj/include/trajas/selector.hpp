// Per-run algorithm selection, loss accounting, and VBS/SBS baselines.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "trajas/regression.hpp"
#include "trajas/trace.hpp"

namespace trajas {

struct RunId {
  int function_id = 0;
  int instance_id = 0;
  int repetition = 0;

  bool operator<(const RunId& o) const {
    if (function_id != o.function_id) return function_id < o.function_id;
    if (instance_id != o.instance_id) return instance_id < o.instance_id;
    return repetition < o.repetition;
  }
  bool operator==(const RunId& o) const {
    return function_id == o.function_id && instance_id == o.instance_id &&
           repetition == o.repetition;
  }

  std::string str() const {
    std::ostringstream os;
    os << "f" << function_id << "_i" << instance_id << "_r" << repetition;
    return os.str();
  }
};

// predicted log target precision per run and algorithm, for one A2 budget
using PredictionTable = std::map<RunId, std::map<OptimizerKind, double>>;
// achieved target precision per run and algorithm, for one A2 budget
using PerformanceTable = std::map<RunId, std::map<OptimizerKind, double>>;
using Selection = std::map<RunId, OptimizerKind>;

inline Selection select(const PredictionTable& pred,
                        const std::vector<OptimizerKind>& portfolio) {
  if (portfolio.empty()) throw std::invalid_argument("empty portfolio");
  Selection out;
  for (const auto& [run, row] : pred) {
    OptimizerKind best = portfolio.front();
    double best_val = std::numeric_limits<double>::infinity();
    for (OptimizerKind k : portfolio) {  // kPortfolio order = tie-break order
      auto it = row.find(k);
      if (it == row.end()) {
        std::ostringstream os;
        os << "missing prediction for " << run.str() << "/" << to_string(k);
        throw std::invalid_argument(os.str());
      }
      if (it->second < best_val) {
        best_val = it->second;
        best = k;
      }
    }
    out[run] = best;
  }
  return out;
}

struct LossRecord {
  RunId run;
  OptimizerKind selected;
  std::vector<OptimizerKind> best_set;  // argmin of capped precision, ties kept
  double f_selected = 0.0;              // capped
  double f_best = 0.0;                  // capped
  double loss = 0.0;                    // log10(f_selected) - log10(f_best)
};

namespace selector_detail {

inline double cap(double precision) {
  return std::max(precision, kPrecisionFloor);
}

inline std::vector<OptimizerKind> best_algorithms(
    const std::map<OptimizerKind, double>& perf,
    const std::vector<OptimizerKind>& portfolio) {
  double best = std::numeric_limits<double>::infinity();
  for (OptimizerKind k : portfolio) best = std::min(best, cap(perf.at(k)));
  std::vector<OptimizerKind> out;
  for (OptimizerKind k : portfolio)
    if (cap(perf.at(k)) == best) out.push_back(k);
  return out;
}

}  // namespace selector_detail

inline std::vector<LossRecord> loss(const PerformanceTable& perf,
                                    const Selection& selection,
                                    const std::vector<OptimizerKind>& portfolio) {
  std::vector<LossRecord> out;
  for (const auto& [run, chosen] : selection) {
    const auto& row = perf.at(run);
    LossRecord rec;
    rec.run = run;
    rec.selected = chosen;
    rec.best_set = selector_detail::best_algorithms(row, portfolio);
    rec.f_selected = selector_detail::cap(row.at(chosen));
    rec.f_best = selector_detail::cap(row.at(rec.best_set.front()));
    rec.loss = std::log10(rec.f_selected) - std::log10(rec.f_best);
    out.push_back(std::move(rec));
  }
  return out;
}

inline double mean_loss(const std::vector<LossRecord>& records) {
  if (records.empty()) throw std::invalid_argument("no loss records");
  double s = 0.0;
  for (const auto& r : records) s += r.loss;
  return s / records.size();
}

struct Baselines {
  OptimizerKind sbs;
  double sbs_mean_loss = 0.0;
  double vbs_mean_loss = 0.0;  // identically 0
  double selector_mean_loss = 0.0;
  double gap_closed = 0.0;  // (sbs - selector) / (sbs - vbs)
};

inline Baselines vbs_sbs(const PerformanceTable& perf,
                         const std::vector<OptimizerKind>& portfolio,
                         double selector_mean) {
  if (perf.empty()) throw std::invalid_argument("empty performance table");
  Baselines b;
  b.selector_mean_loss = selector_mean;
  double best_mean = std::numeric_limits<double>::infinity();
  for (OptimizerKind k : portfolio) {
    Selection pure;
    for (const auto& [run, _] : perf) pure[run] = k;
    const double m = mean_loss(loss(perf, pure, portfolio));
    if (m < best_mean) {
      best_mean = m;
      b.sbs = k;
    }
  }
  b.sbs_mean_loss = best_mean;
  b.gap_closed = best_mean > 0.0 ? (best_mean - selector_mean) / best_mean
                                 : (selector_mean == 0.0 ? 1.0 : -std::numeric_limits<double>::infinity());
  return b;
}

struct ConfusionMatrix {
  std::vector<OptimizerKind> labels;
  std::map<std::pair<OptimizerKind, OptimizerKind>, int> cells;  // (true, sel)
  int excluded = 0;
  int total = 0;

  int at(OptimizerKind truth, OptimizerKind selected) const {
    auto it = cells.find({truth, selected});
    return it == cells.end() ? 0 : it->second;
  }
};

// A run contributes a cell only when the "true best" is unambiguous: it is
// excluded when more than one algorithm different from the selected one ties
// for best.
inline ConfusionMatrix confusion(const PerformanceTable& perf,
                                 const Selection& selection,
                                 const std::vector<OptimizerKind>& portfolio) {
  ConfusionMatrix cm;
  cm.labels = portfolio;
  for (const auto& [run, chosen] : selection) {
    ++cm.total;
    const auto best =
        selector_detail::best_algorithms(perf.at(run), portfolio);
    std::vector<OptimizerKind> others;
    for (OptimizerKind k : best)
      if (k != chosen) others.push_back(k);
    if (others.size() > 1) {
      ++cm.excluded;
      continue;
    }
    // a (tied-)best selection counts on the diagonal
    const bool chosen_is_best =
        std::find(best.begin(), best.end(), chosen) != best.end();
    const OptimizerKind truth = chosen_is_best ? chosen : others.front();
    cm.cells[{truth, chosen}]++;
  }
  return cm;
}

struct CountsTable {
  std::vector<OptimizerKind> algorithms;
  std::vector<int> budgets;
  // best[a][b]: runs where algorithm a is (tied) best at budget b
  std::map<OptimizerKind, std::map<int, int>> best;
  std::map<OptimizerKind, std::map<int, int>> selected;
};

inline CountsTable counts(
    const std::map<int, PerformanceTable>& perf_by_budget,
    const std::map<int, Selection>& selection_by_budget,
    const std::vector<OptimizerKind>& portfolio) {
  CountsTable t;
  t.algorithms = portfolio;
  for (const auto& [budget, perf] : perf_by_budget) {
    t.budgets.push_back(budget);
    for (OptimizerKind k : portfolio) {
      t.best[k][budget] = 0;
      t.selected[k][budget] = 0;
    }
    for (const auto& [run, row] : perf)
      for (OptimizerKind k : selector_detail::best_algorithms(row, portfolio))
        t.best[k][budget]++;
    for (const auto& [run, chosen] : selection_by_budget.at(budget))
      t.selected[chosen][budget]++;
  }
  return t;
}

// ---- CSV emission ---------------------------------------------------------

inline void write_losses_csv(std::ostream& os,
                             const std::vector<LossRecord>& records) {
  os << "run_id,selected,best_set,f_selected,f_best,loss\n";
  for (const auto& r : records) {
    os << r.run.str() << "," << to_string(r.selected) << ",";
    for (std::size_t i = 0; i < r.best_set.size(); ++i)
      os << (i ? "|" : "") << to_string(r.best_set[i]);
    os << "," << r.f_selected << "," << r.f_best << "," << r.loss << "\n";
  }
}

inline void write_confusion_csv(std::ostream& os, const ConfusionMatrix& cm) {
  os << "true_best";
  for (OptimizerKind k : cm.labels) os << "," << to_string(k);
  os << "\n";
  for (OptimizerKind row : cm.labels) {
    os << to_string(row);
    for (OptimizerKind col : cm.labels) os << "," << cm.at(row, col);
    os << "\n";
  }
  os << "excluded," << cm.excluded << "\n";
  os << "total," << cm.total << "\n";
}

inline void write_counts_csv(std::ostream& os, const CountsTable& t,
                             bool best_table) {
  os << "algorithm";
  for (int b : t.budgets) os << "," << b;
  os << "\n";
  const auto& m = best_table ? t.best : t.selected;
  for (OptimizerKind k : t.algorithms) {
    os << to_string(k);
    for (int b : t.budgets) os << "," << m.at(k).at(b);
    os << "\n";
  }
}

inline void write_baselines_csv(
    std::ostream& os,
    const std::vector<std::tuple<int, std::string, Baselines>>& rows) {
  os << "budget,portfolio,sbs,sbs_loss,selector_loss,gap_closed\n";
  for (const auto& [budget, subset, b] : rows)
    os << budget << "," << subset << "," << to_string(b.sbs) << ","
       << b.sbs_mean_loss << "," << b.selector_mean_loss << ","
       << b.gap_closed << "\n";
}

}  // namespace trajas
