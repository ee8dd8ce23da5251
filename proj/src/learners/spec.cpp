#include "opentrend/learners/spec.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace opentrend {
namespace {

enum class Kind { Integer, Real, Text };

struct ParamSchema {
  std::string_view key;
  Kind kind;
  HyperValue fallback;
  double min = -std::numeric_limits<double>::infinity();
  double max = std::numeric_limits<double>::infinity();
  bool min_exclusive = false;
  std::vector<std::string_view> choices = {};
};

constexpr double kInf = std::numeric_limits<double>::infinity();

const std::vector<ParamSchema>& schema(Family family) {
  static const std::vector<ParamSchema> kTree = {
      {"max_depth", Kind::Integer, -1.0, -1, kInf},
      {"max_features", Kind::Integer, 0.0, 0, kInf},
      {"criterion", Kind::Text, std::string("gini"), -kInf, kInf, false, {"gini", "entropy"}},
      {"min_samples_split", Kind::Integer, 2.0, 2, kInf},
      {"min_samples_leaf", Kind::Integer, 1.0, 1, kInf},
  };
  static const std::vector<ParamSchema> kForest = {
      {"n_estimators", Kind::Integer, 100.0, 1, kInf},
      {"max_depth", Kind::Integer, -1.0, -1, kInf},
      // 0 selects floor(sqrt(d)).
      {"max_features", Kind::Integer, 0.0, 0, kInf},
      {"criterion", Kind::Text, std::string("gini"), -kInf, kInf, false, {"gini", "entropy"}},
      {"min_samples_split", Kind::Integer, 2.0, 2, kInf},
      {"min_samples_leaf", Kind::Integer, 1.0, 1, kInf},
  };
  static const std::vector<ParamSchema> kBoost = {
      {"iterations", Kind::Integer, 100.0, 0, kInf},
      {"learning_rate", Kind::Real, 0.3, 0, kInf, true},
      {"max_depth", Kind::Integer, 6.0, 1, 64},
      {"lambda", Kind::Real, 1.0, 0, kInf},
      {"min_child_weight", Kind::Real, 1.0, 0, kInf},
  };
  static const std::vector<ParamSchema> kNaiveBayes = {
      {"var_smoothing", Kind::Real, 1e-9, 0, kInf},
  };
  static const std::vector<ParamSchema> kKnn = {
      {"k", Kind::Integer, 5.0, 1, kInf},
  };
  static const std::vector<ParamSchema> kLogistic = {
      {"C", Kind::Real, 1.0, 0, kInf, true},
      {"tol", Kind::Real, 1e-6, 0, kInf, true},
      {"max_iter", Kind::Integer, 1000.0, 1, kInf},
  };
  static const std::vector<ParamSchema> kMlp = {
      {"hidden_layers", Kind::Text, std::string("128,64,32,32,16,16,8,8")},
      {"activation", Kind::Text, std::string("relu"), -kInf, kInf, false, {"relu"}},
      {"learning_rate", Kind::Real, 1e-3, 0, kInf, true},
      {"momentum", Kind::Real, 0.9, 0, 1},
      {"batch_size", Kind::Integer, 32.0, 1, kInf},
      {"max_epochs", Kind::Integer, 1000.0, 1, kInf},
      {"tol", Kind::Real, 1e-4, 0, kInf},
      {"n_iter_no_change", Kind::Integer, 10.0, 1, kInf},
      {"alpha", Kind::Real, 1e-4, 0, kInf},
  };
  switch (family) {
    case Family::DecisionTree: return kTree;
    case Family::ExtraTrees: return kForest;
    case Family::GradientBoostedTrees: return kBoost;
    case Family::GaussianNB: return kNaiveBayes;
    case Family::KNearest: return kKnn;
    case Family::LogisticRegression: return kLogistic;
    case Family::MLP: return kMlp;
  }
  throw std::logic_error("unhandled family");
}

const ParamSchema& lookup(Family family, std::string_view key) {
  for (const auto& p : schema(family)) {
    if (p.key == key) return p;
  }
  throw std::invalid_argument("unknown hyperparameter '" + std::string(key) + "' for " +
                              std::string(family_name(family)));
}

void check_value(Family family, const ParamSchema& p, const HyperValue& value) {
  const std::string where = std::string(family_name(family)) + "." + std::string(p.key);
  if (p.kind == Kind::Text) {
    const auto* s = std::get_if<std::string>(&value);
    if (!s) throw std::invalid_argument(where + " expects text");
    if (!p.choices.empty()) {
      bool ok = false;
      for (auto c : p.choices) ok = ok || c == *s;
      if (!ok) throw std::invalid_argument(where + ": unsupported value '" + *s + "'");
    }
    return;
  }
  const auto* d = std::get_if<double>(&value);
  if (!d) throw std::invalid_argument(where + " expects a number");
  if (!std::isfinite(*d)) throw std::invalid_argument(where + " must be finite");
  if (p.kind == Kind::Integer && std::floor(*d) != *d) {
    throw std::invalid_argument(where + " must be an integer");
  }
  const bool below = p.min_exclusive ? *d <= p.min : *d < p.min;
  if (below || *d > p.max) throw std::invalid_argument(where + " out of range");
}

const HyperValue& resolve(const ClassifierSpec& spec, std::string_view key) {
  const ParamSchema& p = lookup(spec.family, key);
  const auto it = spec.hyperparams.find(std::string(key));
  return it == spec.hyperparams.end() ? p.fallback : it->second;
}

}  // namespace

std::string_view family_name(Family family) {
  switch (family) {
    case Family::DecisionTree: return "DecisionTree";
    case Family::ExtraTrees: return "ExtraTrees";
    case Family::GradientBoostedTrees: return "GradientBoostedTrees";
    case Family::GaussianNB: return "GaussianNB";
    case Family::KNearest: return "KNearest";
    case Family::LogisticRegression: return "LogisticRegression";
    case Family::MLP: return "MLP";
  }
  return "?";
}

Family parse_family(std::string_view name) {
  for (Family f : {Family::DecisionTree, Family::ExtraTrees, Family::GradientBoostedTrees,
                   Family::GaussianNB, Family::KNearest, Family::LogisticRegression,
                   Family::MLP}) {
    if (family_name(f) == name) return f;
  }
  throw std::invalid_argument("unknown classifier family '" + std::string(name) + "'");
}

double ClassifierSpec::number(std::string_view key) const {
  const HyperValue& v = resolve(*this, key);
  if (const auto* d = std::get_if<double>(&v)) return *d;
  throw std::invalid_argument("hyperparameter '" + std::string(key) + "' is not numeric");
}

long ClassifierSpec::integer(std::string_view key) const {
  return static_cast<long>(number(key));
}

std::string ClassifierSpec::text(std::string_view key) const {
  const HyperValue& v = resolve(*this, key);
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  throw std::invalid_argument("hyperparameter '" + std::string(key) + "' is not text");
}

ClassifierSpec make_spec(Family family, Hyperparams hyperparams, std::uint64_t seed) {
  ClassifierSpec spec;
  spec.family = family;
  spec.hyperparams = std::move(hyperparams);
  spec.seed = seed;
  spec.standardize = family == Family::KNearest || family == Family::LogisticRegression ||
                     family == Family::MLP;
  spec.name = std::string(family_name(family));
  validate(spec);
  return spec;
}

void validate(const ClassifierSpec& spec) {
  for (const auto& [key, value] : spec.hyperparams) {
    check_value(spec.family, lookup(spec.family, key), value);
  }
  if (spec.family == Family::MLP) {
    const std::string layers = spec.text("hidden_layers");
    std::size_t start = 0;
    while (start <= layers.size()) {
      const auto comma = layers.find(',', start);
      const std::string item =
          layers.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      std::size_t used = 0;
      long width = 0;
      try {
        width = std::stol(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != item.size() || width <= 0) {
        throw std::invalid_argument("MLP.hidden_layers: bad width '" + item + "'");
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> kNames = {"dt",  "gnb", "knn",      "logreg",
                                                  "xgb", "mlp", "catboost", "extratrees"};
  return kNames;
}

ClassifierSpec preset(std::string_view name) {
  ClassifierSpec spec;
  if (name == "dt") {
    spec = make_spec(Family::DecisionTree,
                     {{"max_depth", 10.0}, {"max_features", 5.0}, {"criterion", std::string("gini")}});
  } else if (name == "gnb") {
    spec = make_spec(Family::GaussianNB);
  } else if (name == "knn") {
    spec = make_spec(Family::KNearest, {{"k", 5.0}});
  } else if (name == "logreg") {
    spec = make_spec(Family::LogisticRegression);
  } else if (name == "xgb") {
    spec = make_spec(Family::GradientBoostedTrees,
                     {{"iterations", 100.0}, {"max_depth", 6.0}, {"learning_rate", 0.3}});
  } else if (name == "mlp") {
    spec = make_spec(Family::MLP, {{"hidden_layers", std::string("128,64,32,32,16,16,8,8")},
                                   {"activation", std::string("relu")},
                                   {"max_epochs", 1000.0}});
  } else if (name == "catboost") {
    spec = make_spec(Family::GradientBoostedTrees, {{"iterations", 1000.0}, {"learning_rate", 0.1}});
  } else if (name == "extratrees") {
    spec = make_spec(Family::ExtraTrees,
                     {{"n_estimators", 1000.0}, {"criterion", std::string("entropy")}});
  } else {
    throw std::invalid_argument("unknown classifier preset '" + std::string(name) + "'");
  }
  spec.name = std::string(name);
  if (name == "xgb" || name == "catboost") spec.name += '*';
  return spec;
}

}  // namespace opentrend
