#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "trajas/selector.hpp"

using namespace trajas;

namespace {

const std::vector<OptimizerKind> kAll(std::begin(kPortfolio),
                                      std::end(kPortfolio));

PerformanceTable random_perf(std::uint64_t seed, int runs) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-12.0, 2.0);
  PerformanceTable t;
  for (int i = 0; i < runs; ++i) {
    RunId id{1 + i % 6, 1 + i % 2, i};
    for (OptimizerKind k : kAll) t[id][k] = std::pow(10.0, u(rng));
  }
  return t;
}

}  // namespace

TEST_CASE("select takes the argmin of predicted log precision") {
  PredictionTable p;
  RunId id{1, 1, 0};
  p[id] = {{OptimizerKind::BFGS, -6.0},
           {OptimizerKind::CMAES, -4.0},
           {OptimizerKind::DE, -2.0},
           {OptimizerKind::MLSL, -1.0},
           {OptimizerKind::PSO, 0.0}};
  CHECK(select(p, kAll).at(id) == OptimizerKind::BFGS);
}

TEST_CASE("exact ties break by fixed algorithm order") {
  PredictionTable p;
  RunId id{2, 1, 0};
  p[id] = {{OptimizerKind::BFGS, 1.0},
           {OptimizerKind::CMAES, -3.0},
           {OptimizerKind::DE, -3.0},
           {OptimizerKind::MLSL, 0.0},
           {OptimizerKind::PSO, 0.0}};
  CHECK(select(p, kAll).at(id) == OptimizerKind::CMAES);
}

TEST_CASE("excluded portfolio member is never selected") {
  std::vector<OptimizerKind> no_bfgs = {OptimizerKind::CMAES,
                                        OptimizerKind::DE, OptimizerKind::MLSL,
                                        OptimizerKind::PSO};
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-8.0, 0.0);
  PredictionTable p;
  for (int i = 0; i < 50; ++i) {
    RunId id{1, 1, i};
    for (OptimizerKind k : kAll) p[id][k] = u(rng);
    p[id][OptimizerKind::BFGS] = -100.0;  // tempting but excluded
  }
  for (const auto& [run, k] : select(p, no_bfgs))
    CHECK(k != OptimizerKind::BFGS);
}

TEST_CASE("missing prediction is rejected with the run and algorithm named") {
  PredictionTable p;
  RunId id{3, 2, 1};
  p[id] = {{OptimizerKind::BFGS, 0.0}};
  CHECK_THROWS_WITH_AS(select(p, kAll), doctest::Contains("f3_i2_r1"),
                       std::invalid_argument);
}

TEST_CASE("selection is invariant under strictly increasing transforms") {
  PredictionTable p;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-8.0, 0.0);
  for (int i = 0; i < 40; ++i) {
    RunId id{1 + i % 24, 1, i};
    for (OptimizerKind k : kAll) p[id][k] = u(rng);
  }
  Selection base = select(p, kAll);
  PredictionTable warped = p;
  for (auto& [run, row] : warped)
    for (auto& [k, v] : row) v = std::exp(3.0 * v) + 7.0;
  CHECK(select(warped, kAll) == base);
}

TEST_CASE("loss arithmetic and capping") {
  PerformanceTable perf;
  RunId id{1, 1, 0};
  perf[id] = {{OptimizerKind::BFGS, 1e-5},
              {OptimizerKind::CMAES, 1e-3},
              {OptimizerKind::DE, 1.0},
              {OptimizerKind::MLSL, 10.0},
              {OptimizerKind::PSO, 100.0}};

  Selection pick_best{{id, OptimizerKind::BFGS}};
  auto rec = loss(perf, pick_best, kAll);
  REQUIRE(rec.size() == 1);
  CHECK(rec[0].loss == 0.0);
  CHECK(rec[0].best_set == std::vector<OptimizerKind>{OptimizerKind::BFGS});

  Selection pick_cmaes{{id, OptimizerKind::CMAES}};
  CHECK(loss(perf, pick_cmaes, kAll)[0].loss == doctest::Approx(2.0));

  // both below the cap -> tied at 1e-8, loss 0
  perf[id][OptimizerKind::BFGS] = 1e-9;
  perf[id][OptimizerKind::CMAES] = 1e-12;
  auto capped = loss(perf, pick_cmaes, kAll);
  CHECK(capped[0].loss == 0.0);
  CHECK(capped[0].best_set.size() == 2);
}

TEST_CASE("losses are nonnegative and capping cannot make them negative") {
  PerformanceTable perf = random_perf(17, 120);
  for (OptimizerKind chosen : kAll) {
    Selection sel;
    for (const auto& [run, _] : perf) sel[run] = chosen;
    for (const auto& r : loss(perf, sel, kAll)) CHECK(r.loss >= 0.0);
  }
}

TEST_CASE("vbs and sbs baselines") {
  PerformanceTable perf = random_perf(23, 100);

  // oracle selection: always a member of the best set
  Selection vbs_sel;
  for (const auto& [run, row] : perf)
    vbs_sel[run] = selector_detail::best_algorithms(row, kAll).front();
  auto vbs_records = loss(perf, vbs_sel, kAll);
  for (const auto& r : vbs_records) CHECK(r.loss == 0.0);

  Baselines vbs = vbs_sbs(perf, kAll, mean_loss(vbs_records));
  CHECK(vbs.gap_closed == doctest::Approx(1.0));
  CHECK(vbs.sbs_mean_loss > 0.0);

  // selector identical to SBS closes no gap
  Selection sbs_sel;
  for (const auto& [run, _] : perf) sbs_sel[run] = vbs.sbs;
  Baselines sbs = vbs_sbs(perf, kAll, mean_loss(loss(perf, sbs_sel, kAll)));
  CHECK(sbs.gap_closed == doctest::Approx(0.0));

  // a selector worse than SBS has negative gap closed
  OptimizerKind worst = kAll[0];
  double worst_loss = -1.0;
  for (OptimizerKind k : kAll) {
    Selection s;
    for (const auto& [run, _] : perf) s[run] = k;
    const double m = mean_loss(loss(perf, s, kAll));
    if (m > worst_loss) {
      worst_loss = m;
      worst = k;
    }
  }
  Baselines bad = vbs_sbs(perf, kAll, worst_loss);
  CHECK(bad.gap_closed < 0.0);
}

TEST_CASE("confusion matrix counts and the exclusion rule") {
  PerformanceTable perf;
  Selection sel;
  // run 0: unique best DE, selected DE -> diagonal
  RunId a{1, 1, 0};
  perf[a] = {{OptimizerKind::BFGS, 1.0},
             {OptimizerKind::CMAES, 1.0},
             {OptimizerKind::DE, 1e-6},
             {OptimizerKind::MLSL, 1.0},
             {OptimizerKind::PSO, 1.0}};
  sel[a] = OptimizerKind::DE;
  // run 1: DE and PSO tie for best, CMAES selected -> excluded
  RunId b{1, 1, 1};
  perf[b] = {{OptimizerKind::BFGS, 1.0},
             {OptimizerKind::CMAES, 0.5},
             {OptimizerKind::DE, 1e-6},
             {OptimizerKind::MLSL, 1.0},
             {OptimizerKind::PSO, 1e-6}};
  sel[b] = OptimizerKind::CMAES;
  // run 2: unique best MLSL, selected PSO -> off-diagonal
  RunId c{1, 1, 2};
  perf[c] = {{OptimizerKind::BFGS, 1.0},
             {OptimizerKind::CMAES, 1.0},
             {OptimizerKind::DE, 1.0},
             {OptimizerKind::MLSL, 1e-4},
             {OptimizerKind::PSO, 2.0}};
  sel[c] = OptimizerKind::PSO;

  ConfusionMatrix cm = confusion(perf, sel, kAll);
  CHECK(cm.total == 3);
  CHECK(cm.excluded == 1);
  CHECK(cm.at(OptimizerKind::DE, OptimizerKind::DE) == 1);
  CHECK(cm.at(OptimizerKind::MLSL, OptimizerKind::PSO) == 1);
  int cell_sum = 0;
  for (const auto& [key, v] : cm.cells) cell_sum += v;
  CHECK(cell_sum + cm.excluded == cm.total);
}

TEST_CASE("count tables respect tie semantics") {
  PerformanceTable perf;
  RunId a{1, 1, 0};
  perf[a] = {{OptimizerKind::BFGS, 1e-9},   // capped tie with CMAES
             {OptimizerKind::CMAES, 1e-10},
             {OptimizerKind::DE, 1.0},
             {OptimizerKind::MLSL, 1.0},
             {OptimizerKind::PSO, 1.0}};
  Selection sel{{a, OptimizerKind::BFGS}};
  std::map<int, PerformanceTable> pb{{100, perf}};
  std::map<int, Selection> sb{{100, sel}};
  CountsTable t = counts(pb, sb, kAll);
  int best_sum = 0, selected_sum = 0;
  for (OptimizerKind k : kAll) {
    best_sum += t.best[k][100];
    selected_sum += t.selected[k][100];
  }
  CHECK(best_sum == 2);  // two-way tie counted for both
  CHECK(selected_sum == 1);

  // larger table: selected column always sums to the number of runs
  PerformanceTable perf2 = random_perf(5, 60);
  Selection sel2;
  for (const auto& [run, row] : perf2)
    sel2[run] = selector_detail::best_algorithms(row, kAll).front();
  std::map<int, PerformanceTable> pb2{{100, perf2}, {300, perf2}};
  std::map<int, Selection> sb2{{100, sel2}, {300, sel2}};
  CountsTable t2 = counts(pb2, sb2, kAll);
  for (int budget : {100, 300}) {
    int s = 0;
    for (OptimizerKind k : kAll) s += t2.selected[k][budget];
    CHECK(s == 60);
  }
}

TEST_CASE("csv writers emit well-formed tables") {
  PerformanceTable perf = random_perf(31, 10);
  Selection sel;
  for (const auto& [run, row] : perf)
    sel[run] = selector_detail::best_algorithms(row, kAll).front();
  auto records = loss(perf, sel, kAll);

  std::ostringstream losses;
  write_losses_csv(losses, records);
  CHECK(losses.str().find("run_id,selected,best_set") == 0);

  std::ostringstream conf;
  write_confusion_csv(conf, confusion(perf, sel, kAll));
  CHECK(conf.str().find("excluded,") != std::string::npos);

  std::map<int, PerformanceTable> pb{{100, perf}};
  std::map<int, Selection> sb{{100, sel}};
  std::ostringstream cnt;
  write_counts_csv(cnt, counts(pb, sb, kAll), true);
  CHECK(cnt.str().find("algorithm,100") == 0);

  std::ostringstream base;
  Baselines b = vbs_sbs(perf, kAll, mean_loss(records));
  write_baselines_csv(base, {{100, "full", b}});
  CHECK(base.str().find("budget,portfolio,sbs") == 0);
}
