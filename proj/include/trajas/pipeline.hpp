// End-to-end protocol orchestration: configuration, run collection into a
// JSONL archive, feature extraction, model training, selection, reporting.
#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "trajas/features.hpp"
#include "trajas/portfolio.hpp"
#include "trajas/regression.hpp"
#include "trajas/selector.hpp"
#include "trajas/svg.hpp"
#include "trajas/warmstart.hpp"

namespace trajas {

namespace fs = std::filesystem;

// ---- configuration --------------------------------------------------------

struct ProtocolConfig {
  int dimension = 5;
  std::vector<int> functions;       // default 1..24
  std::vector<int> instances;       // default 1..5
  int repetitions = 10;
  std::vector<OptimizerKind> portfolio;  // default all five
  int a1_multiplier = 30;           // A1 budget = 30*D rounded up to lambda
  int feature_budget = 150;
  std::vector<int> a2_budgets = {100, 200, 300, 500, 700, 900};
  std::uint64_t master_seed = 1;
  int jobs = 1;
  std::string out_dir = "results";
  std::vector<OptimizerKind> exclude;  // subset analysis, e.g. {BFGS}
  HyperGrid grid;

  ProtocolConfig() {
    for (int f = 1; f <= 24; ++f) functions.push_back(f);
    for (int i = 1; i <= 5; ++i) instances.push_back(i);
    portfolio.assign(std::begin(kPortfolio), std::end(kPortfolio));
  }

  long a1_budget() const {
    const int lambda = cma_default_population_size(dimension);
    const long raw = static_cast<long>(a1_multiplier) * dimension;
    return (raw + lambda - 1) / lambda * lambda;
  }

  int expected_groups() const { return static_cast<int>(instances.size()); }

  std::vector<OptimizerKind> active_portfolio() const {
    std::vector<OptimizerKind> out;
    for (OptimizerKind k : portfolio)
      if (std::find(exclude.begin(), exclude.end(), k) == exclude.end())
        out.push_back(k);
    return out;
  }

  void validate() const {
    if (dimension < 2) throw std::invalid_argument("dimension must be >= 2");
    if (functions.empty() || instances.empty() || portfolio.empty())
      throw std::invalid_argument("functions/instances/portfolio empty");
    if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
    if (feature_budget > a1_budget())
      throw std::invalid_argument("feature budget exceeds the A1 budget");
    if (a2_budgets.empty() ||
        !std::is_sorted(a2_budgets.begin(), a2_budgets.end()) ||
        a2_budgets.front() <= 0)
      throw std::invalid_argument("A2 budgets must be positive and sorted");
    if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
  }
};

namespace pipeline_detail {

inline std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(std::stoi(tok));
  return out;
}

inline std::vector<OptimizerKind> parse_kind_list(const std::string& s) {
  std::vector<OptimizerKind> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(optimizer_from_string(tok));
  return out;
}

inline MaxFeatures max_features_from_string(const std::string& s) {
  if (s == "all") return MaxFeatures::All;
  if (s == "sqrt") return MaxFeatures::Sqrt;
  if (s == "log2") return MaxFeatures::Log2;
  throw std::invalid_argument("unknown max_features: " + s);
}

inline SplitCriterion criterion_from_string(const std::string& s) {
  if (s == "squared_error") return SplitCriterion::SquaredError;
  if (s == "absolute_error") return SplitCriterion::AbsoluteError;
  if (s == "poisson") return SplitCriterion::Poisson;
  throw std::invalid_argument("unknown criterion: " + s);
}

}  // namespace pipeline_detail

// Applies one `key=value` setting; shared by the config-file parser and the
// CLI override flags so both accept exactly the same keys.
inline void apply_config_key(ProtocolConfig& cfg, const std::string& key,
                             const std::string& value) {
  using namespace pipeline_detail;
  if (key == "dimension") cfg.dimension = std::stoi(value);
  else if (key == "functions") cfg.functions = parse_int_list(value);
  else if (key == "instances") cfg.instances = parse_int_list(value);
  else if (key == "repetitions") cfg.repetitions = std::stoi(value);
  else if (key == "portfolio") cfg.portfolio = parse_kind_list(value);
  else if (key == "a1_multiplier") cfg.a1_multiplier = std::stoi(value);
  else if (key == "feature_budget") cfg.feature_budget = std::stoi(value);
  else if (key == "a2_budgets") cfg.a2_budgets = parse_int_list(value);
  else if (key == "seed") cfg.master_seed = std::stoull(value);
  else if (key == "jobs") cfg.jobs = std::stoi(value);
  else if (key == "out") cfg.out_dir = value;
  else if (key == "exclude") cfg.exclude = parse_kind_list(value);
  else if (key == "grid_n_estimators")
    cfg.grid.n_estimators = parse_int_list(value);
  else if (key == "grid_max_depth") cfg.grid.max_depth = parse_int_list(value);
  else if (key == "grid_min_samples_split")
    cfg.grid.min_samples_split = parse_int_list(value);
  else if (key == "grid_max_features") {
    cfg.grid.max_features.clear();
    std::stringstream ss(value);
    std::string tok;
    while (std::getline(ss, tok, ','))
      cfg.grid.max_features.push_back(
          pipeline_detail::max_features_from_string(tok));
  } else if (key == "grid_criteria") {
    cfg.grid.criteria.clear();
    std::stringstream ss(value);
    std::string tok;
    while (std::getline(ss, tok, ','))
      cfg.grid.criteria.push_back(pipeline_detail::criterion_from_string(tok));
  } else {
    throw std::invalid_argument("unknown configuration key: " + key);
  }
}

inline ProtocolConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw std::runtime_error("cannot open config: " + path);
  ProtocolConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) continue;
    const auto end = line.find_last_not_of(" \t\r");
    line = line.substr(start, end - start + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream os;
      os << path << ":" << lineno << ": expected key=value";
      throw std::runtime_error(os.str());
    }
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t");
      const auto b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    apply_config_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

// ---- run keys and seeds ---------------------------------------------------

inline std::uint64_t run_seed(std::uint64_t master, const RunId& run,
                              const std::string& algorithm) {
  std::uint64_t h = master;
  const std::string key = run.str() + "_" + algorithm;
  for (char c : key)
    h = regression_detail::mix(h, static_cast<std::uint64_t>(c));
  return h;
}

// ---- archive --------------------------------------------------------------

namespace pipeline_detail {

// JSON has no literal for non-finite doubles (the library would emit null);
// wild local-search steps can produce inf objective values, so those are
// encoded as strings and decoded back.
inline nlohmann::json enc_num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline double dec_num(const nlohmann::json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw std::invalid_argument("bad numeric encoding: " + s);
  }
  return j.get<double>();
}

}  // namespace pipeline_detail

// One line per record. A1 prefix records (algorithm "A1") additionally carry
// the captured switch state; A2 records store only their post-switch samples
// with phase_boundary marking where they attach to the shared prefix.
struct ArchiveRecord {
  RunId run;
  int dim = 0;
  std::string algorithm;  // "A1" or an OptimizerKind name
  std::uint64_t seed = 0;
  long phase_boundary = 0;
  std::vector<VectorXd> points;
  std::vector<double> values;
  std::vector<double> best_so_far;
  // switch state, present on A1 records only
  bool has_state = false;
  VectorXd best_x;
  double best_f = 0.0;
  VectorXd cma_mean;
  double cma_sigma = 0.0;
  Eigen::MatrixXd cma_C;

  std::string key() const { return run.str() + "_" + algorithm; }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["function"] = run.function_id;
    j["instance"] = run.instance_id;
    j["repetition"] = run.repetition;
    j["dim"] = dim;
    j["algorithm"] = algorithm;
    j["seed"] = seed;
    j["phase_boundary"] = phase_boundary;
    nlohmann::json samples = nlohmann::json::array();
    for (std::size_t i = 0; i < points.size(); ++i) {
      nlohmann::json x = nlohmann::json::array();
      for (Eigen::Index d = 0; d < points[i].size(); ++d)
        x.push_back(pipeline_detail::enc_num(points[i][d]));
      samples.push_back({std::move(x), pipeline_detail::enc_num(values[i])});
    }
    j["samples"] = std::move(samples);
    nlohmann::json bsf = nlohmann::json::array();
    for (double v : best_so_far) bsf.push_back(pipeline_detail::enc_num(v));
    j["best_so_far"] = std::move(bsf);
    if (has_state) {
      j["best_x"] = std::vector<double>(best_x.data(),
                                        best_x.data() + best_x.size());
      j["best_f"] = best_f;
      j["cma_mean"] = std::vector<double>(cma_mean.data(),
                                          cma_mean.data() + cma_mean.size());
      j["cma_sigma"] = cma_sigma;
      std::vector<double> c;
      for (Eigen::Index r = 0; r < cma_C.rows(); ++r)
        for (Eigen::Index cidx = 0; cidx < cma_C.cols(); ++cidx)
          c.push_back(cma_C(r, cidx));
      j["cma_C"] = std::move(c);  // row-major
    }
    return j;
  }

  static ArchiveRecord from_json(const nlohmann::json& j) {
    ArchiveRecord r;
    r.run = {j.at("function").get<int>(), j.at("instance").get<int>(),
             j.at("repetition").get<int>()};
    r.dim = j.at("dim");
    r.algorithm = j.at("algorithm");
    r.seed = j.at("seed");
    r.phase_boundary = j.at("phase_boundary");
    for (const auto& s : j.at("samples")) {
      VectorXd x(r.dim);
      for (int d = 0; d < r.dim; ++d)
        x[d] = pipeline_detail::dec_num(s.at(0).at(d));
      r.points.push_back(std::move(x));
      r.values.push_back(pipeline_detail::dec_num(s.at(1)));
    }
    for (const auto& v : j.at("best_so_far"))
      r.best_so_far.push_back(pipeline_detail::dec_num(v));
    if (j.contains("best_x")) {
      r.has_state = true;
      auto bx = j.at("best_x").get<std::vector<double>>();
      r.best_x = Eigen::Map<VectorXd>(bx.data(), bx.size());
      r.best_f = j.at("best_f");
      auto cm = j.at("cma_mean").get<std::vector<double>>();
      r.cma_mean = Eigen::Map<VectorXd>(cm.data(), cm.size());
      r.cma_sigma = j.at("cma_sigma");
      auto cc = j.at("cma_C").get<std::vector<double>>();
      r.cma_C = Eigen::Map<
          Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                        Eigen::RowMajor>>(cc.data(), r.dim, r.dim);
    }
    return r;
  }
};

struct Archive {
  std::map<RunId, ArchiveRecord> a1;
  std::map<std::pair<RunId, OptimizerKind>, ArchiveRecord> a2;
};

// Loads an archive, quarantining unparseable lines next to the archive file.
inline Archive load_archive(const std::string& path) {
  Archive arch;
  std::ifstream in(path);
  if (!in.good()) throw std::runtime_error("cannot open archive: " + path);
  std::string line;
  long lineno = 0;
  std::ofstream quarantine;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      ArchiveRecord rec =
          ArchiveRecord::from_json(nlohmann::json::parse(line));
      if (rec.algorithm == "A1")
        arch.a1[rec.run] = std::move(rec);
      else
        arch.a2[{rec.run, optimizer_from_string(rec.algorithm)}] =
            std::move(rec);
    } catch (const std::exception& e) {
      if (!quarantine.is_open())
        quarantine.open(path + ".quarantine", std::ios::app);
      quarantine << "# line " << lineno << ": " << e.what() << "\n"
                 << line << "\n";
    }
  }
  return arch;
}

// ---- collect --------------------------------------------------------------

namespace pipeline_detail {

struct TripleOutput {
  std::vector<ArchiveRecord> records;  // A1 first, then A2 in portfolio order
};

inline ArchiveRecord trace_to_record(const RunTrace& t, const RunId& run,
                                     int dim, const std::string& algorithm,
                                     std::uint64_t seed, long boundary) {
  ArchiveRecord r;
  r.run = run;
  r.dim = dim;
  r.algorithm = algorithm;
  r.seed = seed;
  r.phase_boundary = boundary;
  r.points = t.points;
  r.values = t.values;
  r.best_so_far = t.best_so_far;
  return r;
}

inline TripleOutput collect_triple(const ProtocolConfig& cfg,
                                   const RunId& run) {
  const bbob::ProblemInstance inst(
      {run.function_id, run.instance_id, cfg.dimension});
  TripleOutput out;

  const std::uint64_t a1_seed = run_seed(cfg.master_seed, run, "A1");
  CmaState st;
  RunTrace a1 = trajas::run(OptimizerKind::CMAES, inst, cfg.a1_budget(),
                            a1_seed, nullptr, &st);
  const SwitchState sw = capture(a1, st);
  ArchiveRecord a1_rec =
      trace_to_record(a1, run, cfg.dimension, "A1", a1_seed, 0);
  a1_rec.has_state = true;
  a1_rec.best_x = sw.best_x;
  a1_rec.best_f = sw.best_f;
  a1_rec.cma_mean = sw.cma_mean;
  a1_rec.cma_sigma = sw.cma_sigma;
  a1_rec.cma_C = sw.cma_C;
  out.records.push_back(std::move(a1_rec));

  const long max_budget = cfg.a2_budgets.back();
  for (OptimizerKind k : cfg.portfolio) {
    const std::uint64_t seed = run_seed(cfg.master_seed, run, to_string(k));
    WarmStartSpec spec = warm_start(k, sw, seed);
    RunTrace a2 = trajas::run(k, inst, max_budget, seed, &spec);
    out.records.push_back(trace_to_record(a2, run, cfg.dimension,
                                          to_string(k), seed, sw.a1_length));
  }
  return out;
}

}  // namespace pipeline_detail

// Runs (or resumes) collection. The archive gains one A1 record per triple
// plus one A2 record per portfolio algorithm, written in deterministic order
// by a single writer regardless of the parallelism degree.
inline void collect(const ProtocolConfig& cfg, const std::string& archive_path) {
  cfg.validate();
  std::set<std::string> existing;
  if (fs::exists(archive_path)) {
    Archive prior = load_archive(archive_path);
    for (const auto& [run, rec] : prior.a1) existing.insert(rec.key());
    for (const auto& [key, rec] : prior.a2) existing.insert(rec.key());
  }

  std::vector<RunId> triples;
  for (int f : cfg.functions)
    for (int i : cfg.instances)
      for (int rep = 0; rep < cfg.repetitions; ++rep)
        triples.push_back({f, i, rep});

  std::vector<std::optional<pipeline_detail::TripleOutput>> results(
      triples.size());
  std::vector<std::size_t> todo;
  for (std::size_t t = 0; t < triples.size(); ++t) {
    bool complete = existing.count(triples[t].str() + "_A1") > 0;
    for (OptimizerKind k : cfg.portfolio)
      complete = complete &&
                 existing.count(triples[t].str() + "_" + to_string(k)) > 0;
    if (!complete) todo.push_back(t);
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= todo.size()) return;
      results[todo[i]] =
          pipeline_detail::collect_triple(cfg, triples[todo[i]]);
    }
  };
  std::vector<std::thread> pool;
  for (int j = 0; j < std::min<int>(cfg.jobs, static_cast<int>(todo.size()));
       ++j)
    pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (pool.empty() && !todo.empty()) worker();

  fs::create_directories(fs::path(archive_path).parent_path().empty()
                             ? "."
                             : fs::path(archive_path).parent_path().string());
  std::ofstream out(archive_path, std::ios::app);
  if (!out.good())
    throw std::runtime_error("cannot write archive: " + archive_path);
  for (std::size_t t = 0; t < triples.size(); ++t) {
    if (!results[t]) continue;
    for (const ArchiveRecord& rec : results[t]->records)
      if (!existing.count(rec.key())) out << rec.to_json().dump() << "\n";
  }
}

// ---- fixed-budget performance --------------------------------------------

// Target precision of the concatenated run at exactly (A1 budget + budget)
// evaluations. Budget 0 reads the shared prefix itself.
inline PerformanceTable fixed_budget_performance(const Archive& arch,
                                                 int budget,
                                                 const std::vector<OptimizerKind>& portfolio) {
  if (budget < 0) throw std::invalid_argument("negative budget");
  PerformanceTable out;
  std::map<std::pair<int, int>, bbob::ProblemInstance> problems;
  for (const auto& [key, rec] : arch.a2) {
    const auto& [run, kind] = key;
    if (std::find(portfolio.begin(), portfolio.end(), kind) == portfolio.end())
      continue;
    const ArchiveRecord& a1 = arch.a1.at(run);
    if (budget > static_cast<int>(rec.best_so_far.size())) {
      std::ostringstream os;
      os << "budget " << budget << " beyond collected trace for "
         << run.str();
      throw std::invalid_argument(os.str());
    }
    const double a1_best = a1.best_so_far.back();
    const double best =
        budget == 0 ? a1_best : std::min(a1_best, rec.best_so_far[budget - 1]);
    auto pit = problems.find({run.function_id, run.instance_id});
    if (pit == problems.end())
      pit = problems
                .emplace(std::make_pair(run.function_id, run.instance_id),
                         bbob::ProblemInstance(
                             {run.function_id, run.instance_id, rec.dim}))
                .first;
    out[run][kind] = pit->second.target_precision(best);
  }
  return out;
}

// ---- features stage -------------------------------------------------------

inline void write_features_csv(const Archive& arch, int feature_budget,
                               const std::string& path) {
  std::ofstream out(path);
  if (!out.good()) throw std::runtime_error("cannot write " + path);
  out << std::setprecision(17);
  out << "function,instance,repetition";
  for (const auto& name : feature_schema()) out << "," << name;
  out << "\n";
  for (const auto& [run, rec] : arch.a1) {
    if (static_cast<int>(rec.points.size()) < feature_budget)
      throw std::runtime_error("A1 trace shorter than the feature budget for " +
                               run.str());
    SampleSet s;
    s.X = MatrixXd(feature_budget, rec.dim);
    s.y = VectorXd(feature_budget);
    for (int i = 0; i < feature_budget; ++i) {
      s.X.row(i) = rec.points[i].transpose();
      s.y[i] = rec.values[i];
    }
    FeatureVector fv = compute_features(s);
    out << run.function_id << "," << run.instance_id << "," << run.repetition;
    for (double v : fv.values) out << "," << v;
    out << "\n";
  }
}

struct FeatureTable {
  std::vector<RunId> runs;
  MatrixXd X;
};

inline FeatureTable load_features_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty features csv");
  std::vector<std::vector<double>> rows;
  FeatureTable t;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    std::getline(ss, cell, ',');
    RunId run;
    run.function_id = std::stoi(cell);
    std::getline(ss, cell, ',');
    run.instance_id = std::stoi(cell);
    std::getline(ss, cell, ',');
    run.repetition = std::stoi(cell);
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    t.runs.push_back(run);
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw std::runtime_error("no feature rows in " + path);
  t.X = MatrixXd(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) t.X(i, j) = rows[i][j];
  return t;
}

// ---- train stage ----------------------------------------------------------

struct TrainOutputs {
  TrainAllResult result;
  std::vector<RunId> runs;  // row order of OOF predictions
};

inline TrainOutputs run_training(const ProtocolConfig& cfg,
                                 const Archive& arch,
                                 const FeatureTable& features) {
  TrainInputs in;
  in.features = features.X;
  for (const RunId& run : features.runs) {
    in.function_id.push_back(run.function_id);
    in.instance_id.push_back(run.instance_id);
    in.repetition.push_back(run.repetition);
  }
  for (int b : cfg.a2_budgets) {
    PerformanceTable perf = fixed_budget_performance(arch, b, cfg.portfolio);
    for (OptimizerKind k : cfg.portfolio) {
      VectorXd prec(static_cast<Eigen::Index>(features.runs.size()));
      for (std::size_t i = 0; i < features.runs.size(); ++i) {
        auto rit = perf.find(features.runs[i]);
        if (rit == perf.end() || !rit->second.count(k)) {
          throw std::runtime_error("archive is missing " +
                                   features.runs[i].str() + "/" +
                                   to_string(k));
        }
        prec[static_cast<Eigen::Index>(i)] = rit->second.at(k);
      }
      in.precision[{k, b}] = prec;
    }
  }
  TrainOutputs out;
  out.result = train_all(in, cfg.grid, cfg.a2_budgets, cfg.master_seed,
                         cfg.expected_groups());
  out.runs = features.runs;
  return out;
}

inline void write_r2_tables(const ProtocolConfig& cfg,
                            const TrainAllResult& res,
                            const std::string& out_dir) {
  for (TargetType t : {TargetType::Raw, TargetType::Log10}) {
    std::ofstream out(out_dir + "/r2_" + to_string(t) + ".csv");
    out << std::setprecision(17) << "algorithm";
    for (int b : cfg.a2_budgets) out << "," << b;
    out << "\n";
    for (OptimizerKind k : cfg.portfolio) {
      out << to_string(k);
      for (int b : cfg.a2_budgets)
        out << "," << res.models.at({k, b, t}).report.mean_r2;
      out << "\n";
    }
  }
}

inline void write_model_store(const ProtocolConfig& cfg,
                              const TrainAllResult& res,
                              const std::string& out_dir) {
  fs::create_directories(out_dir + "/models");
  for (const auto& [key, gs] : res.models) {
    std::ofstream model(out_dir + "/models/" + key.str() + ".json");
    model << gs.model.to_json().dump() << "\n";
    nlohmann::json side;
    side["schema_version"] = 1;
    side["algorithm"] = to_string(key.algorithm);
    side["budget"] = key.budget;
    side["target_type"] = to_string(key.target_type);
    side["n_estimators"] = gs.best.n_estimators;
    side["max_features"] = to_string(gs.best.max_features);
    side["max_depth"] = gs.best.max_depth;
    side["min_samples_split"] = gs.best.min_samples_split;
    side["criterion"] = to_string(gs.best.criterion);
    side["fold_r2"] = gs.report.fold_r2;
    side["mean_r2"] = gs.report.mean_r2;
    side["poisson_pruned"] = gs.report.poisson_pruned;
    side["feature_count"] = feature_schema().size();
    std::ofstream meta(out_dir + "/models/" + key.str() + ".meta.json");
    meta << side.dump(2) << "\n";
  }
}

// Out-of-fold predictions of the LOG10 models drive selection: every run's
// prediction comes from a model that never saw its instance group.
inline void write_predictions_csv(const ProtocolConfig& cfg,
                                  const TrainOutputs& out,
                                  const std::string& path) {
  std::ofstream os(path);
  os << std::setprecision(17) << "function,instance,repetition";
  for (int b : cfg.a2_budgets)
    for (OptimizerKind k : cfg.portfolio)
      os << "," << to_string(k) << "@" << b;
  os << "\n";
  for (std::size_t i = 0; i < out.runs.size(); ++i) {
    const RunId& run = out.runs[i];
    os << run.function_id << "," << run.instance_id << "," << run.repetition;
    for (int b : cfg.a2_budgets)
      for (OptimizerKind k : cfg.portfolio)
        os << ","
           << out.result.models.at({k, b, TargetType::Log10})
                  .oof_predictions[static_cast<Eigen::Index>(i)];
    os << "\n";
  }
}

inline std::map<int, PredictionTable> load_predictions_csv(
    const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(in, line);
  std::vector<std::pair<OptimizerKind, int>> columns;
  {
    std::stringstream ss(line);
    std::string cell;
    for (int i = 0; i < 3; ++i) std::getline(ss, cell, ',');
    while (std::getline(ss, cell, ',')) {
      const auto at = cell.find('@');
      columns.push_back({optimizer_from_string(cell.substr(0, at)),
                         std::stoi(cell.substr(at + 1))});
    }
  }
  std::map<int, PredictionTable> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    RunId run;
    std::getline(ss, cell, ',');
    run.function_id = std::stoi(cell);
    std::getline(ss, cell, ',');
    run.instance_id = std::stoi(cell);
    std::getline(ss, cell, ',');
    run.repetition = std::stoi(cell);
    for (const auto& [kind, budget] : columns) {
      std::getline(ss, cell, ',');
      out[budget][run][kind] = std::stod(cell);
    }
  }
  return out;
}

// ---- select stage ---------------------------------------------------------

inline std::string portfolio_tag(const ProtocolConfig& cfg) {
  if (cfg.exclude.empty()) return "full";
  std::string tag = "no";
  for (OptimizerKind k : cfg.exclude) tag += std::string("_") + to_string(k);
  return tag;
}

inline void run_selection(const ProtocolConfig& cfg, const Archive& arch,
                          const std::map<int, PredictionTable>& predictions,
                          const std::string& out_dir) {
  const std::vector<OptimizerKind> active = cfg.active_portfolio();
  if (active.empty()) throw std::invalid_argument("everything excluded");
  const std::string tag = portfolio_tag(cfg);
  const std::string suffix = tag == "full" ? "" : "_" + tag;

  std::map<int, PerformanceTable> perf_by_budget;
  std::map<int, Selection> selection_by_budget;
  std::vector<std::tuple<int, std::string, Baselines>> baseline_rows;
  for (int b : cfg.a2_budgets) {
    PerformanceTable perf = fixed_budget_performance(arch, b, active);
    // filter predictions down to the active portfolio
    PredictionTable pred;
    for (const auto& [run, row] : predictions.at(b))
      for (OptimizerKind k : active) pred[run][k] = row.at(k);
    Selection sel = select(pred, active);
    auto records = loss(perf, sel, active);

    std::ofstream losses(out_dir + "/losses_" + std::to_string(b) + suffix +
                         ".csv");
    losses << std::setprecision(17);
    write_losses_csv(losses, records);
    std::ofstream conf(out_dir + "/confusion_" + std::to_string(b) + suffix +
                       ".csv");
    write_confusion_csv(conf, confusion(perf, sel, active));
    baseline_rows.push_back(
        {b, tag, vbs_sbs(perf, active, mean_loss(records))});
    perf_by_budget[b] = std::move(perf);
    selection_by_budget[b] = std::move(sel);
  }

  CountsTable tables = counts(perf_by_budget, selection_by_budget, active);
  std::ofstream best(out_dir + "/counts_best" + suffix + ".csv");
  write_counts_csv(best, tables, true);
  std::ofstream selected(out_dir + "/counts_selected" + suffix + ".csv");
  write_counts_csv(selected, tables, false);
  std::ofstream baselines(out_dir + "/baselines" + suffix + ".csv");
  baselines << std::setprecision(17);
  write_baselines_csv(baselines, baseline_rows);
}

// ---- report stage ---------------------------------------------------------

namespace pipeline_detail {

inline std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw std::runtime_error("missing report input: " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace pipeline_detail

// Writes mean-convergence CSVs from the archive, then renders every figure
// from CSV inputs only.
inline void run_report(const ProtocolConfig& cfg, const Archive& arch,
                       const std::string& out_dir) {
  const std::string suffix =
      portfolio_tag(cfg) == "full" ? "" : "_" + portfolio_tag(cfg);
  fs::create_directories(out_dir + "/figures");

  // per-function mean best-so-far precision of the concatenated curves
  for (int fid : cfg.functions) {
    const std::string csv_path =
        out_dir + "/convergence_f" + std::to_string(fid) + ".csv";
    {
      std::map<OptimizerKind, std::vector<double>> mean_curve;
      int n_runs = 0;
      for (const auto& [key, rec] : arch.a2) {
        const auto& [run, kind] = key;
        if (run.function_id != fid) continue;
        const ArchiveRecord& a1 = arch.a1.at(run);
        const bbob::ProblemInstance inst(
            {run.function_id, run.instance_id, rec.dim});
        std::vector<double> curve;
        for (double v : a1.best_so_far)
          curve.push_back(inst.target_precision(v));
        for (double v : rec.best_so_far)
          curve.push_back(
              std::min(curve.back(), inst.target_precision(v)));
        auto& acc = mean_curve[kind];
        if (acc.empty()) acc.assign(curve.size(), 0.0);
        for (std::size_t i = 0; i < curve.size(); ++i)
          acc[i] += std::log10(std::max(curve[i], kPrecisionFloor));
        if (kind == cfg.portfolio.front()) ++n_runs;
      }
      if (mean_curve.empty()) continue;
      const int runs_per_algo = n_runs;
      std::ofstream os(csv_path);
      os << std::setprecision(17) << "eval";
      for (const auto& [kind, curve] : mean_curve) os << "," << to_string(kind);
      os << "\n";
      const std::size_t len = mean_curve.begin()->second.size();
      for (std::size_t i = 0; i < len; ++i) {
        os << (i + 1);
        for (const auto& [kind, curve] : mean_curve)
          os << "," << curve[i] / runs_per_algo;
        os << "\n";
      }
    }
    auto rows = pipeline_detail::read_csv(csv_path);
    std::vector<svg::Series> series(rows[0].size() - 1);
    for (std::size_t c = 1; c < rows[0].size(); ++c)
      series[c - 1].label = rows[0][c];
    for (std::size_t r = 1; r < rows.size(); ++r)
      for (std::size_t c = 1; c < rows[r].size(); ++c) {
        series[c - 1].x.push_back(std::stod(rows[r][0]));
        series[c - 1].y.push_back(std::stod(rows[r][c]));
      }
    std::ofstream fig(out_dir + "/figures/convergence_f" +
                      std::to_string(fid) + ".svg");
    svg::line_chart(fig, series, "f" + std::to_string(fid) +
                    " mean best-so-far", "evaluations",
                    "log10 target precision");
  }

  // loss boxplots per budget
  for (int b : cfg.a2_budgets) {
    const std::string path =
        out_dir + "/losses_" + std::to_string(b) + suffix + ".csv";
    auto rows = pipeline_detail::read_csv(path);
    std::vector<double> all;
    for (std::size_t r = 1; r < rows.size(); ++r)
      all.push_back(std::stod(rows[r][5]));
    std::vector<svg::BoxStats> boxes{svg::box_stats("selector", all)};
    std::ofstream fig(out_dir + "/figures/losses_" + std::to_string(b) +
                      suffix + ".svg");
    svg::boxplot(fig, boxes, "selector loss, budget " + std::to_string(b),
                 "loss (orders of magnitude)");
  }

  // count heatmaps
  for (const char* which : {"best", "selected"}) {
    auto rows = pipeline_detail::read_csv(out_dir + "/counts_" +
                                          std::string(which) + suffix + ".csv");
    std::vector<std::string> col_labels(rows[0].begin() + 1, rows[0].end());
    std::vector<std::string> row_labels;
    std::vector<std::vector<double>> values;
    for (std::size_t r = 1; r < rows.size(); ++r) {
      row_labels.push_back(rows[r][0]);
      std::vector<double> v;
      for (std::size_t c = 1; c < rows[r].size(); ++c)
        v.push_back(std::stod(rows[r][c]));
      values.push_back(std::move(v));
    }
    std::ofstream fig(out_dir + "/figures/counts_" + std::string(which) +
                      suffix + ".svg");
    svg::heatmap(fig, row_labels, col_labels, values,
                 std::string("runs ") + which + " per algorithm and budget");
  }

  // R^2 tables
  for (const char* t : {"raw", "log10"}) {
    const std::string path = out_dir + "/r2_" + std::string(t) + ".csv";
    if (!fs::exists(path)) continue;
    auto rows = pipeline_detail::read_csv(path);
    std::vector<std::vector<std::string>> cells;
    for (auto& r : rows) {
      for (std::size_t c = 1; c < r.size(); ++c)
        if (!cells.empty()) {
          std::ostringstream osd;
          osd << std::setprecision(4) << std::stod(r[c]);
          r[c] = osd.str();
        }
      cells.push_back(r);
    }
    std::ofstream fig(out_dir + "/figures/r2_" + std::string(t) + ".svg");
    svg::table(fig, cells, std::string("LOGO R^2, ") + t + " targets");
  }

  // confusion tables
  for (int b : cfg.a2_budgets) {
    const std::string path =
        out_dir + "/confusion_" + std::to_string(b) + suffix + ".csv";
    auto rows = pipeline_detail::read_csv(path);
    std::ofstream fig(out_dir + "/figures/confusion_" + std::to_string(b) +
                      suffix + ".svg");
    svg::table(fig, rows, "confusion, budget " + std::to_string(b));
  }
}

// ---- full pipeline --------------------------------------------------------

inline void run_all(const ProtocolConfig& cfg) {
  cfg.validate();
  fs::create_directories(cfg.out_dir);
  const std::string archive_path = cfg.out_dir + "/archive.jsonl";
  collect(cfg, archive_path);
  Archive arch = load_archive(archive_path);
  write_features_csv(arch, cfg.feature_budget, cfg.out_dir + "/features.csv");
  FeatureTable features = load_features_csv(cfg.out_dir + "/features.csv");
  TrainOutputs trained = run_training(cfg, arch, features);
  write_r2_tables(cfg, trained.result, cfg.out_dir);
  write_model_store(cfg, trained.result, cfg.out_dir);
  write_predictions_csv(cfg, trained, cfg.out_dir + "/predictions_log10.csv");
  auto preds = load_predictions_csv(cfg.out_dir + "/predictions_log10.csv");
  ProtocolConfig full = cfg;
  full.exclude.clear();
  run_selection(full, arch, preds, cfg.out_dir);
  if (!cfg.exclude.empty()) run_selection(cfg, arch, preds, cfg.out_dir);
  run_report(full, arch, cfg.out_dir);
}

}  // namespace trajas
