#include "opentrend/learners/model.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "opentrend/learners.hpp"

namespace opentrend {
namespace {

ClassTreeParams tree_params(const ClassifierSpec& spec) {
  ClassTreeParams p;
  p.max_depth = static_cast<int>(spec.integer("max_depth"));
  p.max_features = static_cast<std::size_t>(spec.integer("max_features"));
  p.impurity = spec.text("criterion") == "entropy" ? Impurity::Entropy : Impurity::Gini;
  p.min_samples_split = static_cast<std::size_t>(spec.integer("min_samples_split"));
  p.min_samples_leaf = static_cast<std::size_t>(spec.integer("min_samples_leaf"));
  return p;
}

std::shared_ptr<const Classifier> fit_family(const ClassifierSpec& spec, const MatrixView& x,
                                             std::span<const Label> y) {
  switch (spec.family) {
    case Family::DecisionTree:
      return std::make_shared<DecisionTreeClassifier>(
          DecisionTreeClassifier::fit(x, y, tree_params(spec), spec.seed));
    case Family::ExtraTrees:
      return std::make_shared<ExtraTreesClassifier>(ExtraTreesClassifier::fit(
          x, y, tree_params(spec), static_cast<std::size_t>(spec.integer("n_estimators")),
          spec.seed));
    case Family::GradientBoostedTrees: {
      BoostingParams p;
      p.iterations = static_cast<int>(spec.integer("iterations"));
      p.learning_rate = spec.number("learning_rate");
      p.max_depth = static_cast<int>(spec.integer("max_depth"));
      p.lambda = spec.number("lambda");
      p.min_child_weight = spec.number("min_child_weight");
      return std::make_shared<GradientBoostedTrees>(GradientBoostedTrees::fit(x, y, p));
    }
    case Family::GaussianNB:
      return std::make_shared<GaussianNaiveBayes>(
          GaussianNaiveBayes::fit(x, y, spec.number("var_smoothing")));
    case Family::KNearest:
      return std::make_shared<KNearestClassifier>(
          KNearestClassifier::fit(x, y, static_cast<std::size_t>(spec.integer("k"))));
    case Family::LogisticRegression: {
      LogisticParams p;
      p.c = spec.number("C");
      p.tol = spec.number("tol");
      p.max_iter = static_cast<int>(spec.integer("max_iter"));
      return std::make_shared<LogisticRegression>(LogisticRegression::fit(x, y, p));
    }
    case Family::MLP: {
      MlpParams p;
      p.hidden = parse_layer_widths(spec.text("hidden_layers"));
      p.learning_rate = spec.number("learning_rate");
      p.momentum = spec.number("momentum");
      p.batch_size = static_cast<int>(spec.integer("batch_size"));
      p.max_epochs = static_cast<int>(spec.integer("max_epochs"));
      p.tol = spec.number("tol");
      p.n_iter_no_change = static_cast<int>(spec.integer("n_iter_no_change"));
      p.alpha = spec.number("alpha");
      p.seed = spec.seed;
      return std::make_shared<Mlp>(Mlp::fit(x, y, p));
    }
  }
  throw std::logic_error("unhandled family");
}

std::shared_ptr<const Classifier> load_family(Family family, const nlohmann::json& j) {
  switch (family) {
    case Family::DecisionTree:
      return std::make_shared<DecisionTreeClassifier>(DecisionTreeClassifier::load(j));
    case Family::ExtraTrees:
      return std::make_shared<ExtraTreesClassifier>(ExtraTreesClassifier::load(j));
    case Family::GradientBoostedTrees:
      return std::make_shared<GradientBoostedTrees>(GradientBoostedTrees::load(j));
    case Family::GaussianNB:
      return std::make_shared<GaussianNaiveBayes>(GaussianNaiveBayes::load(j));
    case Family::KNearest:
      return std::make_shared<KNearestClassifier>(KNearestClassifier::load(j));
    case Family::LogisticRegression:
      return std::make_shared<LogisticRegression>(LogisticRegression::load(j));
    case Family::MLP:
      return std::make_shared<Mlp>(Mlp::load(j));
  }
  throw std::logic_error("unhandled family");
}

void check_finite(const MatrixView& x) {
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (double v : x.row(i)) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument("non-finite feature value in row " + std::to_string(i));
      }
    }
  }
}

}  // namespace

TrainedModel::TrainedModel(ClassifierSpec spec, std::vector<std::string> feature_names,
                           Standardizer standardizer, std::shared_ptr<const Classifier> impl,
                           bool constant)
    : spec_(std::move(spec)),
      feature_names_(std::move(feature_names)),
      standardizer_(std::move(standardizer)),
      impl_(std::move(impl)),
      constant_(constant) {
  if (!impl_) throw std::invalid_argument("TrainedModel without classifier");
  if (!standardizer_.empty() && standardizer_.mean().size() != feature_names_.size()) {
    throw std::invalid_argument("TrainedModel: standardizer width mismatch");
  }
}

double TrainedModel::score(std::span<const double> raw_row) const {
  if (standardizer_.empty()) return impl_->score(raw_row);
  constexpr std::size_t kInline = 64;
  const std::size_t d = raw_row.size();
  if (d <= kInline) {
    std::array<double, kInline> buf;
    standardizer_.apply(raw_row, std::span<double>(buf.data(), d));
    return impl_->score(std::span<const double>(buf.data(), d));
  }
  std::vector<double> buf(d);
  standardizer_.apply(raw_row, buf);
  return impl_->score(buf);
}

std::vector<double> TrainedModel::scores(const FeatureMatrix& x) const {
  if (x.columns() != feature_names_) {
    throw std::invalid_argument("predict: feature columns differ from training columns");
  }
  check_finite(x.view());
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = score(x.row(i));
  return out;
}

std::vector<Label> TrainedModel::predict(const FeatureMatrix& x) const {
  const std::vector<double> s = scores(x);
  std::vector<Label> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = threshold_label(s[i]);
  return out;
}

TrainedModel fit(const ClassifierSpec& spec, const FeatureMatrix& x, std::span<const Label> y) {
  validate(spec);
  if (x.rows() < 2) throw std::invalid_argument("fit needs at least 2 rows");
  if (y.size() != x.rows()) throw std::invalid_argument("fit: label count differs from row count");
  check_finite(x.view());

  std::size_t positives = 0;
  for (Label v : y) {
    if (v > 1) throw std::invalid_argument("fit: labels must be 0 or 1");
    positives += v;
  }
  if (positives == 0 || positives == y.size()) {
    const double value = positives == 0 ? 0.0 : 1.0;
    return TrainedModel(spec, x.columns(), Standardizer{},
                        std::make_shared<ConstantClassifier>(value), true);
  }

  if (spec.standardize) {
    Standardizer standardizer = Standardizer::fit(x.view());
    const std::vector<double> z = standardizer.transform(x.view());
    const MatrixView view{z, x.rows(), x.cols()};
    auto impl = fit_family(spec, view, y);
    return TrainedModel(spec, x.columns(), std::move(standardizer), std::move(impl));
  }
  return TrainedModel(spec, x.columns(), Standardizer{}, fit_family(spec, x.view(), y));
}

TrainedModel fit(const ClassifierSpec& spec, const FeatureMatrix& x, const LabelVector& y) {
  return fit(spec, x, std::span<const Label>(y.labels));
}

std::vector<Label> predict(const TrainedModel& model, const FeatureMatrix& x) {
  return model.predict(x);
}

nlohmann::json spec_to_json(const ClassifierSpec& spec) {
  nlohmann::json hp = nlohmann::json::object();
  for (const auto& [key, value] : spec.hyperparams) {
    if (const auto* d = std::get_if<double>(&value)) {
      hp[key] = *d;
    } else {
      hp[key] = std::get<std::string>(value);
    }
  }
  return {{"family", std::string(family_name(spec.family))},
          {"name", spec.name},
          {"hyperparams", std::move(hp)},
          {"standardize", spec.standardize},
          {"seed", spec.seed}};
}

ClassifierSpec spec_from_json(const nlohmann::json& j) {
  ClassifierSpec spec;
  spec.family = parse_family(j.at("family").get<std::string>());
  spec.name = j.value("name", std::string(family_name(spec.family)));
  spec.standardize = j.at("standardize").get<bool>();
  spec.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& [key, value] : j.at("hyperparams").items()) {
    if (value.is_string()) {
      spec.hyperparams[key] = value.get<std::string>();
    } else {
      spec.hyperparams[key] = value.get<double>();
    }
  }
  validate(spec);
  return spec;
}

nlohmann::json TrainedModel::to_json() const {
  return {{"format", "opentrend-model"},
          {"version", kModelFormatVersion},
          {"spec", spec_to_json(spec_)},
          {"feature_names", feature_names_},
          {"standardizer", standardizer_.empty() ? nlohmann::json(nullptr) : standardizer_.to_json()},
          {"constant", constant_},
          {"state", impl_->save()}};
}

TrainedModel TrainedModel::from_json(const nlohmann::json& j) {
  if (j.value("format", std::string()) != "opentrend-model") {
    throw std::invalid_argument("not an opentrend model blob");
  }
  const int version = j.at("version").get<int>();
  if (version != kModelFormatVersion) {
    throw std::invalid_argument("unsupported model version " + std::to_string(version));
  }
  ClassifierSpec spec = spec_from_json(j.at("spec"));
  auto names = j.at("feature_names").get<std::vector<std::string>>();
  Standardizer standardizer;
  if (!j.at("standardizer").is_null()) standardizer = Standardizer::from_json(j.at("standardizer"));
  const bool constant = j.value("constant", false);
  std::shared_ptr<const Classifier> impl =
      constant ? std::make_shared<ConstantClassifier>(ConstantClassifier::load(j.at("state")))
               : load_family(spec.family, j.at("state"));
  return TrainedModel(std::move(spec), std::move(names), std::move(standardizer), std::move(impl),
                      constant);
}

}  // namespace opentrend
