#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "opentrend/dataset.hpp"
#include "opentrend/explain.hpp"
#include "opentrend/features.hpp"
#include "opentrend/indicators.hpp"
#include "opentrend/labeling.hpp"
#include "opentrend/metrics.hpp"

namespace opentrend {

inline constexpr std::string_view kToolVersion = "0.1.0";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MarketInput {
  std::string market;
  std::string path;
};

struct ShapConfig {
  std::string model = "none";  // classifier preset name, or "none"
  std::string feature_set = "INT+HIST+NOW";
  ShapleyMode mode = ShapleyMode::Exact;
  std::size_t background_size = 128;
  std::size_t rows_subsample = 100;
  std::size_t permutations = 1000;
};

// Every experiment choice in one place. Text form is a flat `key = value`
// grammar (see README); `#` starts a comment; `input` may repeat.
struct RunConfig {
  std::vector<MarketInput> inputs;
  IndicatorParams indicators;
  double split_ratio = 0.8;
  EvalMode eval;
  std::vector<TaskKind> tasks{kAllTasks.begin(), kAllTasks.end()};
  std::vector<FeatureSetMask> feature_sets = default_feature_sets();
  std::vector<std::string> classifiers;  // preset names; defaults to all eight
  std::uint64_t seed = 42;
  ShapConfig shap;
  EffectivenessThresholds thresholds;
  // Execution details: out_dir and threads are left out of the canonical text
  // and hash because results do not depend on them.
  std::string out_dir = "results";
  std::size_t threads = 1;

  RunConfig();

  // Applies one key/value pair; throws ConfigError on unknown keys or bad
  // values. For list keys the value replaces the current list, except
  // `input`, which appends.
  void set(std::string_view key, std::string_view value);

  // Checks cross-field constraints (inputs present, names resolve).
  void validate() const;

  // Stable `key=value` lines covering every result-affecting field.
  std::string canonical_text() const;
  // 16 hex digits (FNV-1a 64 of canonical_text()).
  std::string hash() const;
};

struct ConfigKey {
  std::string_view name;
  std::string_view help;
};
const std::vector<ConfigKey>& config_keys();

// Parses `key = value` lines on top of `base`.
RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig load_config_file(const std::filesystem::path& path, RunConfig base = {});

std::uint64_t fnv1a64(std::string_view text);
std::string fnv1a_hex(std::string_view text);

}  // namespace opentrend
