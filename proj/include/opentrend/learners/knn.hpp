#pragma once

#include <vector>

#include "opentrend/learners/classifier.hpp"

namespace opentrend {

// k-nearest neighbours, Euclidean distance, uniform vote. Equal distances
// are resolved toward the earlier training row. k is clamped to the number of
// training rows.
class KNearestClassifier final : public Classifier {
 public:
  KNearestClassifier(std::size_t k, std::size_t cols, std::vector<double> points,
                     std::vector<Label> labels);

  static KNearestClassifier fit(const MatrixView& x, std::span<const Label> y, std::size_t k);

  double score(std::span<const double> x) const override;
  nlohmann::json save() const override;
  static KNearestClassifier load(const nlohmann::json& j);

 private:
  std::size_t k_;
  std::size_t cols_;
  std::vector<double> points_;
  std::vector<Label> labels_;
};

}  // namespace opentrend
