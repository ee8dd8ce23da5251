#pragma once

#include <array>
#include <vector>

#include "opentrend/learners/classifier.hpp"

namespace opentrend {

// Gaussian naive Bayes with class-frequency priors. Per-class variances are
// inflated by var_smoothing times the largest overall column variance.
class GaussianNaiveBayes final : public Classifier {
 public:
  struct ClassModel {
    double log_prior = 0.0;
    std::vector<double> mean;
    std::vector<double> var;
  };

  explicit GaussianNaiveBayes(std::array<ClassModel, 2> classes) : classes_(std::move(classes)) {}

  static GaussianNaiveBayes fit(const MatrixView& x, std::span<const Label> y,
                                double var_smoothing);

  // Joint log-likelihood log P(x, y = c).
  double joint_log_likelihood(std::span<const double> x, int c) const;
  double score(std::span<const double> x) const override;
  nlohmann::json save() const override;
  static GaussianNaiveBayes load(const nlohmann::json& j);

 private:
  std::array<ClassModel, 2> classes_;
};

}  // namespace opentrend
