// opentrend command-line entry point. Each pipeline stage is a subcommand.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "opentrend/charts.hpp"
#include "opentrend/config.hpp"
#include "opentrend/dataset.hpp"
#include "opentrend/report.hpp"
#include "opentrend/synth.hpp"

namespace ot = opentrend;

namespace {

std::string flag_name(std::string_view key) {
  std::string out(key);
  for (char& c : out) {
    if (c == '_') c = '-';
  }
  return out;
}

// Mirrors every config key as a --flag on `cmd`. Values are applied after the
// config file, in key order, so flags override the file.
struct ConfigFlags {
  std::string config_file;
  std::map<std::string, std::vector<std::string>> values;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_file, "config file (key = value lines)");
    for (const auto& key : ot::config_keys()) {
      auto& slot = values[std::string(key.name)];
      auto* opt = cmd->add_option("--" + flag_name(key.name), slot, std::string(key.help));
      if (key.name != "input") opt->expected(1);
    }
  }

  ot::RunConfig resolve() const {
    ot::RunConfig config;
    if (!config_file.empty()) config = ot::load_config_file(config_file);
    for (const auto& key : ot::config_keys()) {
      const auto it = values.find(std::string(key.name));
      if (it == values.end()) continue;
      for (const auto& v : it->second) config.set(key.name, v);
    }
    return config;
  }
};

int run_ingest(const std::string& path, const std::string& market) {
  const ot::OhlcSeries series = ot::read_csv_file(path, market);
  std::cout << "rows " << series.size() << '\n';
  if (!series.empty()) {
    std::cout << "first " << series[0].date.to_string() << '\n';
    std::cout << "last " << series[series.size() - 1].date.to_string() << '\n';
  }
  if (series.size() >= 3) {
    const auto stats = ot::volatility(series);
    std::cout << "daily_volatility " << ot::format_double(stats.daily_volatility) << '\n';
    std::cout << "periodized_volatility " << ot::format_double(stats.periodized_volatility) << '\n';
  }
  return ot::kExitOk;
}

int run_featurize(const std::string& input, const std::string& market, const std::string& out_path,
                  const std::string& feature_set, const std::vector<std::string>& task_names,
                  const ot::IndicatorParams& params) {
  const ot::OhlcSeries series = ot::read_csv_file(input, market);
  params.validate();
  const auto rows = ot::assemble(series, params);
  const ot::FeatureMatrix matrix = ot::select(rows, ot::FeatureSetMask::parse(feature_set));
  std::vector<std::vector<unsigned char>> labels;
  std::vector<std::string> names;
  for (const auto& t : task_names) {
    const ot::TaskKind task = ot::parse_task(t);
    labels.push_back(ot::make_labels(series, task, params.first_defined_index()).labels);
    names.push_back("y_" + std::string(ot::task_name(task)));
  }
  std::ostringstream out;
  ot::write_feature_csv(out, matrix, labels, names);
  if (out_path.empty() || out_path == "-") {
    std::cout << out.str();
  } else {
    ot::write_file(out_path, out.str());
  }
  return ot::kExitOk;
}

int run_explain(const ot::RunConfig& config) {
  if (config.shap.model == "none") throw ot::ConfigError("explain needs --shap-model");
  config.validate();
  const auto markets = ot::load_inputs(config);
  std::filesystem::create_directories(config.out_dir);
  const ot::Provenance provenance = ot::Provenance::of(config);
  for (const auto& m : markets) {
    for (ot::TaskKind task : config.tasks) {
      const ot::ShapleyEntry entry = ot::explain_market(config, m.series, task);
      const std::string stem =
          "shap_" + ot::file_token(m.market) + "_" + std::string(ot::task_name(task));
      std::ostringstream csv;
      ot::write_shapley_csv(csv, entry, provenance);
      ot::write_file(std::filesystem::path(config.out_dir) / (stem + ".csv"), csv.str());
      ot::write_file(std::filesystem::path(config.out_dir) / (stem + ".svg"),
                     ot::shapley_bar_svg(entry, provenance));
      std::cout << stem << '\n';
      for (std::size_t j = 0; j < entry.report.feature_names.size(); ++j) {
        std::cout << "  " << entry.report.feature_names[j] << ' '
                  << ot::format_double(entry.report.global_importance[j]) << '\n';
      }
    }
  }
  return ot::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"opentrend: next-day open direction from daily OHLC data"};
  app.require_subcommand(1);

  std::string input;
  std::string market;
  auto* ingest = app.add_subcommand("ingest", "validate an OHLC CSV and print a summary");
  ingest->add_option("input", input, "CSV file with date,open,high,low,close")->required();
  ingest->add_option("--market", market, "market id");

  ot::GenSpec gen;
  std::string gen_kind = "random_walk";
  std::string gen_start = "2019-04-01";
  std::string gen_out;
  auto* synth = app.add_subcommand("synth", "generate a seeded synthetic OHLC series");
  synth->add_option("--kind", gen_kind, "random_walk | trend | constant | separable");
  synth->add_option("--days", gen.days, "trading days");
  synth->add_option("--seed", gen.seed, "seed");
  synth->add_option("--market", gen.market, "market id");
  synth->add_option("--start", gen_start, "first date (YYYY-MM-DD)");
  synth->add_option("--start-price", gen.start_price, "initial price");
  synth->add_option("--drift", gen.drift, "per-day mean log return");
  synth->add_option("--volatility", gen.volatility, "per-day log-return standard deviation");
  synth->add_option("--trend-slope", gen.trend_slope, "trend: per-day log-price slope");
  synth->add_option("--strength", gen.strength, "separable: probability the planted rule decides");
  synth->add_option("--out", gen_out, "output CSV (default stdout)");

  std::string feat_out;
  std::string feat_set = "ALL";
  std::vector<std::string> feat_tasks{"op", "hi", "lo", "cl"};
  ot::IndicatorParams feat_params;
  auto* featurize = app.add_subcommand("featurize", "write the feature matrix and labels as CSV");
  featurize->add_option("input", input, "OHLC CSV")->required();
  featurize->add_option("--market", market, "market id");
  featurize->add_option("--feature-set", feat_set, "feature set, e.g. INT+HIST+NOW or ALL");
  featurize->add_option("--tasks", feat_tasks, "label columns to append")->delimiter(',');
  featurize->add_option("--window-n", feat_params.window_n, "indicator window");
  featurize->add_option("--bollinger-k", feat_params.bollinger_k, "Bollinger width");
  featurize->add_option("--keltner-k", feat_params.keltner_k, "Keltner width");
  featurize->add_flag("--bollinger-paper-literal", feat_params.bollinger_paper_literal,
                      "per-index SMA centering for Bollinger deviations");
  featurize->add_option("--out", feat_out, "output CSV (default stdout)");

  ConfigFlags run_flags;
  auto* run = app.add_subcommand("run", "evaluate the full grid and write every report");
  run_flags.attach(run);

  std::string results_path;
  std::string table_out;
  double acc_threshold = 0.8;
  double mcc_threshold = 0.65;
  auto* table = app.add_subcommand("table3", "reliability summary from results.csv");
  table->add_option("results", results_path, "results.csv")->required();
  auto* acc_opt = table->add_option("--acc-threshold", acc_threshold, "accuracy threshold");
  auto* mcc_opt = table->add_option("--mcc-threshold", mcc_threshold, "MCC threshold");
  table->add_option("--out", table_out, "also write the summary CSV here");

  std::string chart_metric = "both";
  std::string chart_dir = ".";
  auto* chart = app.add_subcommand("chart", "bubble-grid SVG charts from results.csv");
  chart->add_option("results", results_path, "results.csv")->required();
  chart->add_option("--metric", chart_metric, "accuracy | mcc | both");
  chart->add_option("--out-dir", chart_dir, "directory for SVG files");

  ConfigFlags explain_flags;
  auto* explain = app.add_subcommand("explain", "Shapley attribution for the configured model");
  explain_flags.attach(explain);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return ot::kExitConfigError;
  }

  try {
    if (*ingest) return run_ingest(input, market);

    if (*synth) {
      gen.kind = ot::parse_gen_kind(gen_kind);
      gen.start = ot::Date::parse(gen_start);
      const std::string csv = ot::to_csv(ot::generate(gen));
      if (gen_out.empty() || gen_out == "-") {
        std::cout << csv;
      } else {
        ot::write_file(gen_out, csv);
      }
      return ot::kExitOk;
    }

    if (*featurize) {
      return run_featurize(input, market, feat_out, feat_set, feat_tasks, feat_params);
    }

    if (*run) {
      const ot::RunConfig config = run_flags.resolve();
      const int code = ot::cmd_run(config, std::cerr);
      if (code != ot::kExitConfigError) {
        std::cout << "wrote results to " << config.out_dir << " (config_hash " << config.hash()
                  << ")\n";
      }
      return code;
    }

    if (*table) {
      ot::ResultsBundle bundle = ot::read_results_file(results_path);
      ot::EffectivenessThresholds thresholds = bundle.provenance.thresholds;
      if (*acc_opt) thresholds.accuracy = acc_threshold;
      if (*mcc_opt) thresholds.mcc = mcc_threshold;
      if (bundle.records.empty()) throw ot::DataError("results file has no records");
      const auto cells = ot::table3(bundle.records, thresholds);
      std::cout << ot::table3_pretty(cells, thresholds);
      if (!table_out.empty()) {
        std::ostringstream csv;
        ot::write_table3_csv(csv, cells, thresholds, bundle.provenance);
        ot::write_file(table_out, csv.str());
      }
      return ot::kExitOk;
    }

    if (*chart) {
      const ot::ResultsBundle bundle = ot::read_results_file(results_path);
      if (bundle.records.empty()) throw ot::DataError("results file has no records");
      std::vector<ot::ChartFile> files;
      if (chart_metric == "both") {
        files = ot::bubble_charts(bundle, ot::ChartMetric::Accuracy);
        for (auto& f : ot::bubble_charts(bundle, ot::ChartMetric::Mcc)) files.push_back(std::move(f));
      } else {
        files = ot::bubble_charts(bundle, ot::parse_chart_metric(chart_metric));
      }
      std::filesystem::create_directories(chart_dir);
      for (const auto& f : files) {
        ot::write_file(std::filesystem::path(chart_dir) / f.name, f.svg);
        std::cout << f.name << '\n';
      }
      return ot::kExitOk;
    }

    if (*explain) return run_explain(explain_flags.resolve());
  } catch (const ot::FitError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return ot::kExitCellFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return ot::kExitConfigError;
  }
  return ot::kExitOk;
}
