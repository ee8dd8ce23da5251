#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "opentrend/features.hpp"
#include "opentrend/labeling.hpp"
#include "opentrend/learners/classifier.hpp"
#include "opentrend/learners/spec.hpp"
#include "opentrend/learners/standardizer.hpp"

namespace opentrend {

inline constexpr int kModelFormatVersion = 1;

// A fitted classifier plus everything needed to apply it to raw feature rows:
// its spec, the training column names and (when enabled) the train-only
// standardizer. Immutable; safe to share across threads.
class TrainedModel {
 public:
  TrainedModel(ClassifierSpec spec, std::vector<std::string> feature_names,
               Standardizer standardizer, std::shared_ptr<const Classifier> impl,
               bool constant = false);

  const ClassifierSpec& spec() const { return spec_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const Standardizer& standardizer() const { return standardizer_; }
  const Classifier& classifier() const { return *impl_; }
  // True when training labels were single-class.
  bool is_constant() const { return constant_; }

  // Pre-threshold score of one raw (unstandardized) row.
  double score(std::span<const double> raw_row) const;

  // Throws on column-name mismatch or non-finite input.
  std::vector<double> scores(const FeatureMatrix& x) const;
  std::vector<Label> predict(const FeatureMatrix& x) const;

  nlohmann::json to_json() const;
  static TrainedModel from_json(const nlohmann::json& j);

 private:
  ClassifierSpec spec_;
  std::vector<std::string> feature_names_;
  Standardizer standardizer_;
  std::shared_ptr<const Classifier> impl_;
  bool constant_ = false;
};

// Deterministic in spec.seed. Single-class labels yield a constant predictor.
TrainedModel fit(const ClassifierSpec& spec, const FeatureMatrix& x, std::span<const Label> y);
TrainedModel fit(const ClassifierSpec& spec, const FeatureMatrix& x, const LabelVector& y);

std::vector<Label> predict(const TrainedModel& model, const FeatureMatrix& x);

nlohmann::json spec_to_json(const ClassifierSpec& spec);
ClassifierSpec spec_from_json(const nlohmann::json& j);

}  // namespace opentrend
