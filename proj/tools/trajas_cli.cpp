// Command-line driver for the trajectory-based algorithm selection workbench.
//
//   trajas collect  --config desk.cfg --jobs 8
//   trajas features --out results
//   trajas train    --out results --seed 7
//   trajas select   --out results --exclude BFGS
//   trajas report   --out results
//   trajas all      --config desk.cfg
//
// Any configuration key can also be overridden with --set key=value.

#include <CLI11.hpp>
#include <iostream>

#include "trajas/pipeline.hpp"

using namespace trajas;

namespace {

struct CliState {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<std::string> out;
  std::optional<std::string> exclude;

  ProtocolConfig resolve() const {
    ProtocolConfig cfg =
        config_path.empty() ? ProtocolConfig{} : load_config(config_path);
    for (const std::string& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw CLI::ValidationError("--set expects key=value, got: " + kv);
      apply_config_key(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed) cfg.master_seed = *seed;
    if (jobs) cfg.jobs = *jobs;
    if (out) cfg.out_dir = *out;
    if (exclude) apply_config_key(cfg, "exclude", *exclude);
    cfg.validate();
    return cfg;
  }
};

void add_common_flags(CLI::App* cmd, CliState& st) {
  cmd->add_option("--config", st.config_path, "configuration file (key=value)");
  cmd->add_option("--set", st.overrides,
                  "override a configuration key, e.g. --set repetitions=3");
  cmd->add_option("--seed", st.seed, "master seed");
  cmd->add_option("--jobs", st.jobs, "worker threads");
  cmd->add_option("--out", st.out, "output directory");
  cmd->add_option("--exclude", st.exclude,
                  "comma-separated algorithms to drop from selection");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trajectory-based per-run algorithm selection workbench"};
  app.require_subcommand(1);
  CliState st;

  CLI::App* collect_cmd =
      app.add_subcommand("collect", "run the A1 prefix and warm-started A2 "
                                    "continuations into the archive");
  CLI::App* features_cmd =
      app.add_subcommand("features", "compute trajectory features from the "
                                     "archive");
  CLI::App* train_cmd =
      app.add_subcommand("train", "grid-search and train the performance "
                                  "regressors");
  CLI::App* select_cmd =
      app.add_subcommand("select", "select per-run algorithms and score the "
                                   "selector");
  CLI::App* report_cmd =
      app.add_subcommand("report", "emit CSV tables and SVG figures");
  CLI::App* all_cmd = app.add_subcommand("all", "run every stage in order");
  for (CLI::App* cmd : {collect_cmd, features_cmd, train_cmd, select_cmd,
                        report_cmd, all_cmd})
    add_common_flags(cmd, st);

  CLI11_PARSE(app, argc, argv);

  try {
    ProtocolConfig cfg = st.resolve();
    fs::create_directories(cfg.out_dir);
    const std::string archive_path = cfg.out_dir + "/archive.jsonl";

    if (all_cmd->parsed()) {
      run_all(cfg);
    } else if (collect_cmd->parsed()) {
      collect(cfg, archive_path);
    } else if (features_cmd->parsed()) {
      Archive arch = load_archive(archive_path);
      write_features_csv(arch, cfg.feature_budget,
                         cfg.out_dir + "/features.csv");
    } else if (train_cmd->parsed()) {
      Archive arch = load_archive(archive_path);
      FeatureTable features =
          load_features_csv(cfg.out_dir + "/features.csv");
      TrainOutputs trained = run_training(cfg, arch, features);
      write_r2_tables(cfg, trained.result, cfg.out_dir);
      write_model_store(cfg, trained.result, cfg.out_dir);
      write_predictions_csv(cfg, trained,
                            cfg.out_dir + "/predictions_log10.csv");
    } else if (select_cmd->parsed()) {
      Archive arch = load_archive(archive_path);
      auto preds =
          load_predictions_csv(cfg.out_dir + "/predictions_log10.csv");
      run_selection(cfg, arch, preds, cfg.out_dir);
    } else if (report_cmd->parsed()) {
      Archive arch = load_archive(archive_path);
      run_report(cfg, arch, cfg.out_dir);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
