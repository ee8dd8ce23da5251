#pragma once

#include <vector>

#include "opentrend/learners/classifier.hpp"
#include "opentrend/learners/tree.hpp"

namespace opentrend {

struct BoostingParams {
  int iterations = 100;
  double learning_rate = 0.3;
  int max_depth = 6;
  double lambda = 1.0;            // L2 penalty on leaf weights
  double min_child_weight = 1.0;  // minimum hessian mass per child
};

// Gradient-boosted regression trees on the logistic loss. Starts from the
// prior log-odds; each round fits a depth-limited tree to the loss gradients
// with second-order leaf weights -G/(H + lambda), shrunk by learning_rate.
// Splits are found exactly over pre-sorted columns, level by level.
class GradientBoostedTrees final : public Classifier {
 public:
  GradientBoostedTrees(double base_margin, std::vector<Tree> trees)
      : base_margin_(base_margin), trees_(std::move(trees)) {}

  static GradientBoostedTrees fit(const MatrixView& x, std::span<const Label> y,
                                  const BoostingParams& params);

  double margin(std::span<const double> x) const;
  double score(std::span<const double> x) const override;
  nlohmann::json save() const override;
  static GradientBoostedTrees load(const nlohmann::json& j);

  double base_margin() const { return base_margin_; }
  const std::vector<Tree>& trees() const { return trees_; }

 private:
  double base_margin_;
  std::vector<Tree> trees_;
};

}  // namespace opentrend
