#include "opentrend/report.hpp"

#include <algorithm>
#include <charconv>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "opentrend/charts.hpp"
#include "opentrend/dataset.hpp"
#include "opentrend/learners/spec.hpp"
#include "opentrend/random.hpp"

namespace opentrend {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = line.find(',');
    out.push_back(trim(line.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return out;
}

double parse_double_field(std::string_view text, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw DataError("results line " + std::to_string(line_no) + ": bad number '" +
                    std::string(text) + "'");
  }
  return v;
}

std::size_t parse_count_field(std::string_view text, std::size_t line_no) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw DataError("results line " + std::to_string(line_no) + ": bad count '" +
                    std::string(text) + "'");
  }
  return v;
}

// Runs fn(i) for i in [0, n) on `threads` workers pulling indices in order.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

constexpr std::string_view kResultsHeader =
    "market,task,feature_set,classifier,accuracy,mcc,n_train,n_test,effective";

std::string_view task_implication(std::string_view task) {
  if (task == "op") return "Tomorrow's open > today's open?";
  if (task == "hi") return "Tomorrow's open > today's high?";
  if (task == "lo") return "Tomorrow's open > today's low?";
  if (task == "cl") return "Tomorrow's open > today's close?";
  return "";
}

}  // namespace

Provenance Provenance::of(const RunConfig& config) {
  Provenance p;
  p.config_hash = config.hash();
  p.seed = config.seed;
  p.config_text = config.canonical_text();
  p.thresholds = config.thresholds;
  return p;
}

std::string Provenance::comment_line() const {
  return "# opentrend " + tool_version + " config_hash=" + config_hash +
         " seed=" + std::to_string(seed) + " acc_threshold=" + format_double(thresholds.accuracy) +
         " mcc_threshold=" + format_double(thresholds.mcc);
}

std::uint64_t cell_seed(std::uint64_t seed, std::string_view market, TaskKind task,
                        std::string_view feature_set, std::string_view classifier) {
  std::string key(market);
  key += '/';
  key += task_name(task);
  key += '/';
  key += feature_set;
  key += '/';
  key += classifier;
  return derive_seed(seed, fnv1a64(key));
}

std::vector<MarketData> load_inputs(const RunConfig& config) {
  std::vector<MarketData> out;
  out.reserve(config.inputs.size());
  for (const auto& input : config.inputs) {
    try {
      out.push_back({input.market, read_csv_file(input.path, input.market)});
    } catch (const std::exception& e) {
      throw DataError(input.path + ": " + e.what());
    }
  }
  return out;
}

ResultsBundle run_grid(const RunConfig& config, std::span<const MarketData> markets) {
  ResultsBundle bundle;
  bundle.provenance = Provenance::of(config);

  // Datasets are shared by every classifier of a (market, task, feature set).
  struct Group {
    std::string market;
    TaskKind task;
    std::string feature_set;
    std::optional<LabeledDataset> dataset;
    Split split;
    std::string error;
  };
  std::vector<Group> groups;
  for (const auto& m : markets) {
    for (TaskKind task : config.tasks) {
      for (const auto& mask : config.feature_sets) {
        Group g{m.market, task, mask.name(), std::nullopt, {}, {}};
        try {
          g.dataset = build_dataset(m.series, config.indicators, mask, task);
          g.split = split(*g.dataset, config.split_ratio);
        } catch (const std::exception& e) {
          g.dataset.reset();
          g.error = e.what();
        }
        groups.push_back(std::move(g));
      }
    }
  }

  std::vector<ClassifierSpec> learners;
  for (const auto& name : config.classifiers) learners.push_back(preset(name));

  const std::size_t n_cells = groups.size() * learners.size();
  std::vector<std::optional<EvalRecord>> records(n_cells);
  std::vector<std::string> errors(n_cells);

  parallel_for(n_cells, config.threads, [&](std::size_t cell) {
    const Group& g = groups[cell / learners.size()];
    const ClassifierSpec& learner = learners[cell % learners.size()];
    if (!g.dataset) {
      errors[cell] = g.error;
      return;
    }
    try {
      const std::uint64_t seed =
          cell_seed(config.seed, g.market, g.task, g.feature_set, learner.name);
      const auto predicted = rolling_predict(*g.dataset, g.split, learner, config.eval, seed);
      const std::span<const Label> truth =
          std::span<const Label>(g.dataset->labels.labels).subspan(g.split.test_begin(), g.split.n_test);
      records[cell] = make_record(g.market, std::string(task_name(g.task)), g.feature_set,
                                  learner.name, confusion(truth, predicted), g.split.n_train,
                                  config.thresholds);
    } catch (const std::exception& e) {
      errors[cell] = e.what();
    }
  });

  for (std::size_t cell = 0; cell < n_cells; ++cell) {
    if (records[cell]) {
      bundle.records.push_back(std::move(*records[cell]));
    } else {
      const Group& g = groups[cell / learners.size()];
      bundle.failures.push_back({g.market, std::string(task_name(g.task)), g.feature_set,
                                 learners[cell % learners.size()].name, errors[cell]});
    }
  }
  return bundle;
}

ShapleyEntry explain_market(const RunConfig& config, const OhlcSeries& series, TaskKind task) {
  if (config.shap.model == "none") throw std::invalid_argument("no Shapley model configured");
  const FeatureSetMask mask = FeatureSetMask::parse(config.shap.feature_set);
  const LabeledDataset ds = build_dataset(series, config.indicators, mask, task);
  const Split sp = split(ds, config.split_ratio);

  ClassifierSpec spec = preset(config.shap.model);
  spec.seed = cell_seed(config.seed, series.market(), task, mask.name(), spec.name);
  const TrainedModel model =
      fit(spec, ds.matrix.slice(0, sp.n_train),
          std::span<const Label>(ds.labels.labels).subspan(0, sp.n_train));

  const std::uint64_t base = derive_seed(spec.seed, 0x5ba9);
  const auto bg_idx = sample_rows(0, sp.n_train, config.shap.background_size, derive_seed(base, 1));
  const auto row_idx = sample_rows(sp.test_begin(), sp.test_end(), config.shap.rows_subsample,
                                   derive_seed(base, 2));

  GlobalImportanceOptions options;
  options.mode = config.shap.mode;
  options.n_permutations = config.shap.permutations;
  options.seed = derive_seed(base, 3);
  options.threads = config.threads;

  ShapleyEntry entry;
  entry.market = series.market();
  entry.task = task;
  entry.feature_set = mask.name();
  entry.report = global_importance(model, ds.matrix.take(row_idx), ds.matrix.take(bg_idx), options);
  entry.report.model = spec.name;
  return entry;
}

void write_results_csv(std::ostream& out, const ResultsBundle& bundle) {
  out << bundle.provenance.comment_line() << '\n' << kResultsHeader << '\n';
  for (const auto& r : bundle.records) {
    out << r.market << ',' << r.task << ',' << r.feature_set << ',' << r.classifier << ','
        << format_double(r.accuracy) << ',' << format_double(r.mcc) << ',' << r.n_train << ','
        << r.n_test << ',' << (r.effective ? "true" : "false") << '\n';
  }
}

ResultsBundle read_results_csv(std::istream& in) {
  ResultsBundle bundle;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      std::istringstream tokens{std::string(view.substr(1))};
      std::string token;
      while (tokens >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        if (key == "config_hash") bundle.provenance.config_hash = value;
        if (key == "seed") bundle.provenance.seed = std::stoull(value);
        if (key == "acc_threshold") bundle.provenance.thresholds.accuracy = parse_double_field(value, line_no);
        if (key == "mcc_threshold") bundle.provenance.thresholds.mcc = parse_double_field(value, line_no);
      }
      continue;
    }
    if (!header_seen) {
      if (view != kResultsHeader) {
        throw DataError("results line " + std::to_string(line_no) + ": unexpected header");
      }
      header_seen = true;
      continue;
    }
    const auto f = split_commas(view);
    if (f.size() != 9) {
      throw DataError("results line " + std::to_string(line_no) + ": expected 9 fields");
    }
    EvalRecord r;
    r.market = std::string(f[0]);
    r.task = std::string(f[1]);
    r.feature_set = std::string(f[2]);
    r.classifier = std::string(f[3]);
    r.accuracy = parse_double_field(f[4], line_no);
    r.mcc = parse_double_field(f[5], line_no);
    r.n_train = parse_count_field(f[6], line_no);
    r.n_test = parse_count_field(f[7], line_no);
    if (f[8] != "true" && f[8] != "false") {
      throw DataError("results line " + std::to_string(line_no) + ": bad effective flag");
    }
    r.effective = f[8] == "true";
    bundle.records.push_back(std::move(r));
  }
  if (!header_seen) throw DataError("results file has no header");
  return bundle;
}

ResultsBundle read_results_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_results_csv(in);
}

nlohmann::json bundle_to_json(const ResultsBundle& bundle) {
  const Provenance& p = bundle.provenance;
  nlohmann::json out;
  out["provenance"] = {{"tool", "opentrend"},
                       {"version", p.tool_version},
                       {"config_hash", p.config_hash},
                       {"seed", p.seed},
                       {"config", p.config_text},
                       {"acc_threshold", p.thresholds.accuracy},
                       {"mcc_threshold", p.thresholds.mcc}};
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : bundle.records) {
    records.push_back({{"market", r.market},
                       {"task", r.task},
                       {"feature_set", r.feature_set},
                       {"classifier", r.classifier},
                       {"accuracy", r.accuracy},
                       {"mcc", r.mcc},
                       {"n_train", r.n_train},
                       {"n_test", r.n_test},
                       {"effective", r.effective}});
  }
  out["records"] = std::move(records);
  nlohmann::json shapley = nlohmann::json::array();
  for (const auto& s : bundle.shapley) {
    nlohmann::json importance = nlohmann::json::array();
    for (std::size_t j = 0; j < s.report.feature_names.size(); ++j) {
      importance.push_back(
          {{"feature", s.report.feature_names[j]}, {"importance", s.report.global_importance[j]}});
    }
    shapley.push_back({{"market", s.market},
                       {"task", std::string(task_name(s.task))},
                       {"feature_set", s.feature_set},
                       {"model", s.report.model},
                       {"mode", std::string(shapley_mode_name(s.report.mode))},
                       {"background_size", s.report.background_size},
                       {"rows", s.report.rows},
                       {"importance", std::move(importance)}});
  }
  out["shapley"] = std::move(shapley);
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : bundle.failures) {
    failures.push_back({{"market", f.market},
                        {"task", f.task},
                        {"feature_set", f.feature_set},
                        {"classifier", f.classifier},
                        {"error", f.message}});
  }
  out["failures"] = std::move(failures);
  return out;
}

void write_shapley_csv(std::ostream& out, const ShapleyEntry& entry, const Provenance& provenance) {
  out << provenance.comment_line() << " market=" << entry.market
      << " task=" << task_name(entry.task) << " feature_set=" << entry.feature_set
      << " model=" << entry.report.model << " mode=" << shapley_mode_name(entry.report.mode)
      << '\n';
  out << "feature,importance\n";
  for (std::size_t j = 0; j < entry.report.feature_names.size(); ++j) {
    out << entry.report.feature_names[j] << ',' << format_double(entry.report.global_importance[j])
        << '\n';
  }
}

std::vector<ReliabilityCell> table3(std::span<const EvalRecord> records,
                                    const EffectivenessThresholds& thresholds) {
  std::vector<std::string> markets;
  for (const auto& r : records) {
    if (std::find(markets.begin(), markets.end(), r.market) == markets.end()) {
      markets.push_back(r.market);
    }
  }
  std::vector<ReliabilityCell> cells;
  for (TaskKind task : kAllTasks) {
    const std::string name(task_name(task));
    for (const auto& market : markets) {
      ReliabilityCell cell{market, name};
      bool present = false;
      for (const auto& r : records) {
        if (r.market != market || r.task != name) continue;
        present = true;
        cell.accuracy_met = cell.accuracy_met || r.accuracy >= thresholds.accuracy;
        cell.mcc_met = cell.mcc_met || r.mcc >= thresholds.mcc;
        cell.reliable = cell.reliable || thresholds.effective(r.accuracy, r.mcc);
      }
      if (present) cells.push_back(std::move(cell));
    }
  }
  return cells;
}

void write_table3_csv(std::ostream& out, std::span<const ReliabilityCell> cells,
                      const EffectivenessThresholds& thresholds, const Provenance& provenance) {
  Provenance p = provenance;
  p.thresholds = thresholds;
  out << p.comment_line() << '\n';
  out << "task,implication,market,accuracy_met,mcc_met,reliable\n";
  for (const auto& c : cells) {
    out << c.task << ",\"" << task_implication(c.task) << "\"," << c.market << ','
        << (c.accuracy_met ? "true" : "false") << ',' << (c.mcc_met ? "true" : "false") << ','
        << (c.reliable ? "true" : "false") << '\n';
  }
}

std::string table3_pretty(std::span<const ReliabilityCell> cells,
                          const EffectivenessThresholds& thresholds) {
  std::vector<std::string> markets;
  for (const auto& c : cells) {
    if (std::find(markets.begin(), markets.end(), c.market) == markets.end()) {
      markets.push_back(c.market);
    }
  }
  const auto mark = [](bool ok) { return ok ? std::string("✓") : std::string("--"); };
  std::ostringstream out;
  out << "Effective classifier: accuracy >= " << format_double(thresholds.accuracy)
      << " and MCC >= " << format_double(thresholds.mcc) << '\n';
  out << "task";
  for (const auto& m : markets) out << " | " << m << " acc | " << m << " mcc | " << m << " both";
  out << '\n';
  for (TaskKind task : kAllTasks) {
    const std::string name(task_name(task));
    bool any = false;
    std::ostringstream row;
    row << name;
    for (const auto& m : markets) {
      const auto it = std::find_if(cells.begin(), cells.end(), [&](const ReliabilityCell& c) {
        return c.market == m && c.task == name;
      });
      if (it == cells.end()) {
        row << " | - | - | -";
        continue;
      }
      any = true;
      row << " | " << mark(it->accuracy_met) << " | " << mark(it->mcc_met) << " | "
          << mark(it->reliable);
    }
    if (any) out << row.str() << '\n';
  }
  return out.str();
}

std::string file_token(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    if (!ok) c = '_';
  }
  return out;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

int cmd_run(const RunConfig& config, std::ostream& log, ResultsBundle* bundle_out) {
  std::vector<MarketData> markets;
  try {
    config.validate();
    markets = load_inputs(config);
    std::filesystem::create_directories(config.out_dir);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfigError;
  }

  ResultsBundle bundle = run_grid(config, markets);

  if (config.shap.model != "none") {
    for (const auto& m : markets) {
      for (TaskKind task : config.tasks) {
        try {
          bundle.shapley.push_back(explain_market(config, m.series, task));
        } catch (const std::exception& e) {
          bundle.failures.push_back({m.market, std::string(task_name(task)),
                                     config.shap.feature_set, config.shap.model,
                                     std::string("shapley: ") + e.what()});
        }
      }
    }
  }

  const std::filesystem::path dir(config.out_dir);
  try {
    std::ostringstream csv;
    write_results_csv(csv, bundle);
    write_file(dir / "results.csv", csv.str());
    write_file(dir / "results.json", bundle_to_json(bundle).dump(2) + "\n");

    for (const auto& entry : bundle.shapley) {
      std::ostringstream s;
      write_shapley_csv(s, entry, bundle.provenance);
      write_file(dir / ("shap_" + file_token(entry.market) + "_" +
                        std::string(task_name(entry.task)) + ".csv"),
                 s.str());
    }
    if (!bundle.records.empty()) {
      std::ostringstream t;
      write_table3_csv(t, table3(bundle.records, config.thresholds), config.thresholds,
                       bundle.provenance);
      write_file(dir / "table3.csv", t.str());
    }
    for (const auto& chart : all_charts(bundle)) write_file(dir / chart.name, chart.svg);

    if (!bundle.failures.empty()) {
      std::ostringstream err;
      err << bundle.provenance.comment_line() << '\n';
      for (const auto& f : bundle.failures) {
        err << f.market << ' ' << f.task << ' ' << f.feature_set << ' ' << f.classifier << ": "
            << f.message << '\n';
      }
      write_file(dir / "errors.log", err.str());
    }
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    if (bundle_out) *bundle_out = std::move(bundle);
    return kExitConfigError;
  }

  for (const auto& f : bundle.failures) {
    log << "cell failed: " << f.market << ' ' << f.task << ' ' << f.feature_set << ' '
        << f.classifier << ": " << f.message << '\n';
  }
  const int code = bundle.failures.empty() ? kExitOk : kExitCellFailure;
  if (bundle_out) *bundle_out = std::move(bundle);
  return code;
}

}  // namespace opentrend
