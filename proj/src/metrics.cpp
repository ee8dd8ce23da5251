#include "opentrend/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace opentrend {

ConfusionMatrix confusion(std::span<const Label> y_true, std::span<const Label> y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw std::invalid_argument("confusion: length mismatch");
  }
  if (y_true.empty()) throw std::invalid_argument("confusion: empty input");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const bool truth = y_true[i] != 0;
    const bool pred = y_pred[i] != 0;
    if (truth && pred) {
      ++cm.tp;
    } else if (!truth && !pred) {
      ++cm.tn;
    } else if (pred) {
      ++cm.fp;
    } else {
      ++cm.fn;
    }
  }
  return cm;
}

double accuracy(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw std::invalid_argument("accuracy of empty confusion matrix");
  return static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
}

double mcc(const ConfusionMatrix& cm) {
  const auto tp = static_cast<double>(cm.tp);
  const auto tn = static_cast<double>(cm.tn);
  const auto fp = static_cast<double>(cm.fp);
  const auto fn = static_cast<double>(cm.fn);
  const double a = tp + fp;
  const double b = tp + fn;
  const double c = tn + fp;
  const double d = tn + fn;
  if (a == 0 || b == 0 || c == 0 || d == 0) return 0.0;
  const double value = (tp * tn - fp * fn) / std::sqrt(a * b * c * d);
  return std::clamp(value, -1.0, 1.0);
}

EvalRecord make_record(std::string market, std::string task, std::string feature_set,
                       std::string classifier, const ConfusionMatrix& cm, std::size_t n_train,
                       const EffectivenessThresholds& thresholds) {
  EvalRecord r;
  r.market = std::move(market);
  r.task = std::move(task);
  r.feature_set = std::move(feature_set);
  r.classifier = std::move(classifier);
  r.accuracy = accuracy(cm);
  r.mcc = mcc(cm);
  r.n_train = n_train;
  r.n_test = static_cast<std::size_t>(cm.total());
  r.effective = thresholds.effective(r.accuracy, r.mcc);
  return r;
}

}  // namespace opentrend
