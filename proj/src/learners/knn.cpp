#include "opentrend/learners/knn.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace opentrend {

KNearestClassifier::KNearestClassifier(std::size_t k, std::size_t cols, std::vector<double> points,
                                       std::vector<Label> labels)
    : k_(k), cols_(cols), points_(std::move(points)), labels_(std::move(labels)) {
  if (labels_.empty() || points_.size() != labels_.size() * cols_ || k_ == 0) {
    throw std::invalid_argument("knn: inconsistent state");
  }
  k_ = std::min(k_, labels_.size());
}

KNearestClassifier KNearestClassifier::fit(const MatrixView& x, std::span<const Label> y,
                                           std::size_t k) {
  if (x.rows == 0 || y.size() != x.rows) throw std::invalid_argument("knn: bad training shape");
  return KNearestClassifier(k, x.cols, std::vector<double>(x.data.begin(), x.data.end()),
                            std::vector<Label>(y.begin(), y.end()));
}

double KNearestClassifier::score(std::span<const double> x) const {
  const std::size_t n = labels_.size();
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    const double* p = points_.data() + i * cols_;
    for (std::size_t j = 0; j < cols_; ++j) s += (x[j] - p[j]) * (x[j] - p[j]);
    dist[i] = {s, i};
  }
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_), dist.end());
  double votes = 0.0;
  for (std::size_t i = 0; i < k_; ++i) votes += labels_[dist[i].second];
  return votes / static_cast<double>(k_);
}

nlohmann::json KNearestClassifier::save() const {
  return {{"k", k_}, {"cols", cols_}, {"points", points_}, {"labels", labels_}};
}

KNearestClassifier KNearestClassifier::load(const nlohmann::json& j) {
  return KNearestClassifier(j.at("k").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                            j.at("points").get<std::vector<double>>(),
                            j.at("labels").get<std::vector<Label>>());
}

}  // namespace opentrend
