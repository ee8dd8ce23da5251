#include "opentrend/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "opentrend/learners/spec.hpp"

namespace opentrend {
namespace {

std::string_view trim(std::string_view s) {
  const auto blank = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && blank(s.front())) s.remove_prefix(1);
  while (!s.empty() && blank(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> out;
  while (true) {
    const auto comma = value.find(',');
    const std::string_view item = trim(value.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    value.remove_prefix(comma + 1);
  }
  return out;
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ConfigError("config key '" + std::string(key) + "': bad number '" + std::string(value) +
                      "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "on" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "off" || value == "no") return false;
  throw ConfigError("config key '" + std::string(key) + "': expected true/false, got '" +
                    std::string(value) + "'");
}

std::string num(double v) { return format_double(v); }

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> kKeys = {
      {"input", "market input as MARKET:path/to.csv (repeatable)"},
      {"window_n", "indicator look-back window (default 20)"},
      {"bollinger_k", "Bollinger band width in standard deviations (default 2)"},
      {"keltner_k", "Keltner band width in ATRs (default 2)"},
      {"bollinger_paper_literal", "center Bollinger deviations on the per-index SMA (default false)"},
      {"split_ratio", "chronological train fraction (default 0.8)"},
      {"eval_mode", "static | rolling (default static)"},
      {"refit_every", "rolling mode: refit every N test points (default 1)"},
      {"freeze_window", "rolling mode: slide a fixed-size train window (default false)"},
      {"tasks", "comma list of op,hi,lo,cl (default all)"},
      {"feature_sets", "comma list of feature sets, e.g. INT,INT+HIST,INT+NOW,INT+HIST+NOW"},
      {"classifiers", "comma list of presets: dt,gnb,knn,logreg,xgb,mlp,catboost,extratrees"},
      {"seed", "global seed (default 42)"},
      {"shap_model", "preset to attribute with Shapley values, or none (default none)"},
      {"shap_feature_set", "feature set for attribution (default INT+HIST+NOW)"},
      {"shap_mode", "exact | sampled (default exact)"},
      {"shap_background", "background rows drawn from the train split (default 128)"},
      {"shap_rows", "test rows attributed (default 100)"},
      {"shap_permutations", "sampled mode: permutations per row (default 1000)"},
      {"acc_threshold", "accuracy level for an effective classifier (default 0.8)"},
      {"mcc_threshold", "MCC level for an effective classifier (default 0.65)"},
      {"out_dir", "output directory; does not affect results (default results)"},
      {"threads", "worker threads; does not affect results (default 1)"},
  };
  return kKeys;
}

RunConfig::RunConfig() : classifiers(preset_names()) {}

void RunConfig::set(std::string_view key, std::string_view raw) {
  const std::string_view value = trim(raw);
  try {
    if (key == "input") {
      const auto colon = value.find(':');
      if (colon == std::string_view::npos || colon == 0 || colon + 1 == value.size()) {
        throw ConfigError("input must be MARKET:path, got '" + std::string(value) + "'");
      }
      const std::string market(trim(value.substr(0, colon)));
      for (char c : market) {
        const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
                        c == '-' || c == '_' || c == '.' || c == '&';
        if (!ok) throw ConfigError("market id '" + market + "' may only use letters, digits, - _ . &");
      }
      inputs.push_back({market, std::string(trim(value.substr(colon + 1)))});
    } else if (key == "window_n") {
      indicators.window_n = parse_number<int>(key, value);
    } else if (key == "bollinger_k") {
      indicators.bollinger_k = parse_number<double>(key, value);
    } else if (key == "keltner_k") {
      indicators.keltner_k = parse_number<double>(key, value);
    } else if (key == "bollinger_paper_literal") {
      indicators.bollinger_paper_literal = parse_bool(key, value);
    } else if (key == "split_ratio") {
      split_ratio = parse_number<double>(key, value);
    } else if (key == "eval_mode") {
      eval.kind = parse_eval_mode(value);
    } else if (key == "refit_every") {
      eval.refit_every = parse_number<std::size_t>(key, value);
    } else if (key == "freeze_window") {
      eval.freeze_window = parse_bool(key, value);
    } else if (key == "tasks") {
      tasks.clear();
      for (const auto& t : split_list(value)) tasks.push_back(parse_task(t));
    } else if (key == "feature_sets") {
      feature_sets.clear();
      for (const auto& f : split_list(value)) feature_sets.push_back(FeatureSetMask::parse(f));
    } else if (key == "classifiers") {
      classifiers = split_list(value);
      for (const auto& c : classifiers) (void)preset(c);
    } else if (key == "seed") {
      seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "shap_model") {
      if (value != "none") (void)preset(value);
      shap.model = std::string(value);
    } else if (key == "shap_feature_set") {
      shap.feature_set = FeatureSetMask::parse(value).name();
    } else if (key == "shap_mode") {
      shap.mode = parse_shapley_mode(value);
    } else if (key == "shap_background") {
      shap.background_size = parse_number<std::size_t>(key, value);
    } else if (key == "shap_rows") {
      shap.rows_subsample = parse_number<std::size_t>(key, value);
    } else if (key == "shap_permutations") {
      shap.permutations = parse_number<std::size_t>(key, value);
    } else if (key == "acc_threshold") {
      thresholds.accuracy = parse_number<double>(key, value);
    } else if (key == "mcc_threshold") {
      thresholds.mcc = parse_number<double>(key, value);
    } else if (key == "out_dir") {
      out_dir = std::string(value);
    } else if (key == "threads") {
      threads = parse_number<std::size_t>(key, value);
    } else {
      throw ConfigError("unknown config key '" + std::string(key) + "'");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("config key '" + std::string(key) + "': " + e.what());
  }
}

void RunConfig::validate() const {
  if (inputs.empty()) throw ConfigError("no inputs configured");
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (inputs[i].market == inputs[j].market) {
        throw ConfigError("duplicate market id '" + inputs[i].market + "'");
      }
    }
  }
  try {
    indicators.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) throw ConfigError("split_ratio must be in (0, 1)");
  if (eval.refit_every == 0) throw ConfigError("refit_every must be positive");
  if (tasks.empty()) throw ConfigError("no tasks configured");
  if (feature_sets.empty()) throw ConfigError("no feature sets configured");
  if (classifiers.empty()) throw ConfigError("no classifiers configured");
  if (threads == 0) throw ConfigError("threads must be positive");
  if (shap.model != "none") {
    if (shap.background_size == 0) throw ConfigError("shap_background must be positive");
    if (shap.rows_subsample == 0) throw ConfigError("shap_rows must be positive");
    if (shap.mode == ShapleyMode::Sampled && shap.permutations == 0) {
      throw ConfigError("shap_permutations must be positive");
    }
    if (shap.mode == ShapleyMode::Exact &&
        FeatureSetMask::parse(shap.feature_set).columns().size() > kMaxExactFeatures) {
      throw ConfigError("shap feature set too wide for exact mode");
    }
  }
}

std::string RunConfig::canonical_text() const {
  std::ostringstream out;
  for (const auto& in : inputs) out << "input=" << in.market << ':' << in.path << '\n';
  out << "window_n=" << indicators.window_n << '\n';
  out << "bollinger_k=" << num(indicators.bollinger_k) << '\n';
  out << "keltner_k=" << num(indicators.keltner_k) << '\n';
  out << "bollinger_paper_literal=" << (indicators.bollinger_paper_literal ? "true" : "false")
      << '\n';
  out << "split_ratio=" << num(split_ratio) << '\n';
  out << "eval_mode=" << eval_mode_name(eval.kind) << '\n';
  out << "refit_every=" << eval.refit_every << '\n';
  out << "freeze_window=" << (eval.freeze_window ? "true" : "false") << '\n';
  out << "tasks=";
  for (std::size_t i = 0; i < tasks.size(); ++i) out << (i ? "," : "") << task_name(tasks[i]);
  out << "\nfeature_sets=";
  for (std::size_t i = 0; i < feature_sets.size(); ++i) {
    out << (i ? "," : "") << feature_sets[i].name();
  }
  out << "\nclassifiers=";
  for (std::size_t i = 0; i < classifiers.size(); ++i) out << (i ? "," : "") << classifiers[i];
  out << "\nseed=" << seed << '\n';
  out << "shap_model=" << shap.model << '\n';
  out << "shap_feature_set=" << shap.feature_set << '\n';
  out << "shap_mode=" << shapley_mode_name(shap.mode) << '\n';
  out << "shap_background=" << shap.background_size << '\n';
  out << "shap_rows=" << shap.rows_subsample << '\n';
  out << "shap_permutations=" << shap.permutations << '\n';
  out << "acc_threshold=" << num(thresholds.accuracy) << '\n';
  out << "mcc_threshold=" << num(thresholds.mcc) << '\n';
  return out.str();
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fnv1a_hex(std::string_view text) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(text)));
  return buf;
}

std::string RunConfig::hash() const { return fnv1a_hex(canonical_text()); }

RunConfig parse_config(std::string_view text, RunConfig base) {
  RunConfig config = std::move(base);
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    try {
      config.set(trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return config;
}

RunConfig load_config_file(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::move(base));
}

}  // namespace opentrend
