#pragma once

#include <span>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "opentrend/features.hpp"
#include "opentrend/labeling.hpp"

namespace opentrend {

// Fit failures such as optimizer divergence.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A fitted binary classifier over already-standardized inputs. score() is
// P(y = 1 | x) (or a monotone surrogate in [0, 1]); the label is 1 iff
// score >= 0.5. Implementations are immutable after fit.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual double score(std::span<const double> x) const = 0;
  virtual nlohmann::json save() const = 0;
};

inline Label threshold_label(double score) { return score >= 0.5 ? 1 : 0; }

// Predicts a fixed class; used whenever the training labels are single-class.
class ConstantClassifier final : public Classifier {
 public:
  explicit ConstantClassifier(double value) : value_(value) {}
  double score(std::span<const double>) const override { return value_; }
  nlohmann::json save() const override { return {{"value", value_}}; }
  static ConstantClassifier load(const nlohmann::json& j) { return ConstantClassifier(j.at("value").get<double>()); }

 private:
  double value_;
};

}  // namespace opentrend
