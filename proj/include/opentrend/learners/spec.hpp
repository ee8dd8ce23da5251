#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace opentrend {

enum class Family {
  DecisionTree,
  ExtraTrees,
  GradientBoostedTrees,
  GaussianNB,
  KNearest,
  LogisticRegression,
  MLP,
};

std::string_view family_name(Family family);
Family parse_family(std::string_view name);

using HyperValue = std::variant<double, std::string>;
using Hyperparams = std::map<std::string, HyperValue>;

struct ClassifierSpec {
  Family family = Family::DecisionTree;
  // Only explicitly set keys; everything else falls back to family defaults.
  Hyperparams hyperparams;
  bool standardize = false;
  std::uint64_t seed = 0;
  // Display label used in reports (e.g. "dt", "xgb*").
  std::string name;

  // Resolved values (explicit or default). Throw on unknown keys.
  double number(std::string_view key) const;
  long integer(std::string_view key) const;
  std::string text(std::string_view key) const;
};

// Spec for a family with default hyperparameters and the family's default
// standardization setting (on for KNearest, LogisticRegression and MLP).
ClassifierSpec make_spec(Family family, Hyperparams hyperparams = {}, std::uint64_t seed = 0);

// Throws std::invalid_argument on unknown keys, wrong value kinds or values
// outside the family's schema.
void validate(const ClassifierSpec& spec);

// The eight experiment presets: dt, gnb, knn, logreg, xgb, mlp, catboost,
// extratrees. xgb and catboost are both GradientBoostedTrees; their report
// labels carry a '*' to mark the substitution.
ClassifierSpec preset(std::string_view name);
const std::vector<std::string>& preset_names();

}  // namespace opentrend
