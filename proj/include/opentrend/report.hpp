#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "opentrend/config.hpp"
#include "opentrend/explain.hpp"
#include "opentrend/metrics.hpp"
#include "opentrend/ohlc.hpp"

namespace opentrend {

enum ExitCode : int { kExitOk = 0, kExitCellFailure = 1, kExitConfigError = 2 };

// Enough to regenerate an output: tool version, config hash and text, seed.
struct Provenance {
  std::string tool_version{kToolVersion};
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string config_text;
  EffectivenessThresholds thresholds;

  static Provenance of(const RunConfig& config);
  // `# opentrend <version> config_hash=<hash> seed=<seed>`
  std::string comment_line() const;
};

struct ShapleyEntry {
  std::string market;
  TaskKind task = TaskKind::OpVsOp;
  std::string feature_set;
  ShapleyReport report;
};

struct CellFailure {
  std::string market;
  std::string task;
  std::string feature_set;
  std::string classifier;
  std::string message;
};

struct ResultsBundle {
  std::vector<EvalRecord> records;  // grid order: market, task, feature set, classifier
  std::vector<ShapleyEntry> shapley;
  std::vector<CellFailure> failures;
  Provenance provenance;
};

// Seed for one grid cell, keyed by names so it does not depend on grid size,
// cell order or thread count.
std::uint64_t cell_seed(std::uint64_t seed, std::string_view market, TaskKind task,
                        std::string_view feature_set, std::string_view classifier);

struct MarketData {
  std::string market;
  OhlcSeries series;
};

// Reads every configured input. Throws DataError naming the failing file.
std::vector<MarketData> load_inputs(const RunConfig& config);

// Evaluates the whole grid. Cells that throw are recorded as failures and left
// out of `records`; the rest are unaffected.
ResultsBundle run_grid(const RunConfig& config, std::span<const MarketData> markets);

// Fits config.shap.model on the train split of (market, task) and attributes a
// subsample of test rows against a train-split background.
ShapleyEntry explain_market(const RunConfig& config, const OhlcSeries& series, TaskKind task);

// Full pipeline: validate, load, evaluate, explain, write everything under
// out_dir. Returns an ExitCode; diagnostics go to `log`.
int cmd_run(const RunConfig& config, std::ostream& log, ResultsBundle* bundle_out = nullptr);

// results.csv: provenance comment line, header, one row per record.
void write_results_csv(std::ostream& out, const ResultsBundle& bundle);
// Reads records (and the hash/seed from the comment line, if present).
ResultsBundle read_results_csv(std::istream& in);
ResultsBundle read_results_file(const std::filesystem::path& path);

nlohmann::json bundle_to_json(const ResultsBundle& bundle);

void write_shapley_csv(std::ostream& out, const ShapleyEntry& entry, const Provenance& provenance);

struct ReliabilityCell {
  std::string market;
  std::string task;
  bool accuracy_met = false;  // some record has accuracy >= threshold
  bool mcc_met = false;       // some record has mcc >= threshold
  bool reliable = false;      // some single record meets both
};

// One cell per (market, task), tasks in op/hi/lo/cl order, markets in
// first-appearance order.
std::vector<ReliabilityCell> table3(std::span<const EvalRecord> records,
                                    const EffectivenessThresholds& thresholds);
void write_table3_csv(std::ostream& out, std::span<const ReliabilityCell> cells,
                      const EffectivenessThresholds& thresholds, const Provenance& provenance);
// Tasks as rows; per market an accuracy, an MCC and a combined column, each a
// check mark or a dash.
std::string table3_pretty(std::span<const ReliabilityCell> cells,
                          const EffectivenessThresholds& thresholds);

// Replaces characters unsafe in file names with '_'.
std::string file_token(std::string_view text);

// Writes `content` to `path` via a temporary file and rename.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace opentrend
