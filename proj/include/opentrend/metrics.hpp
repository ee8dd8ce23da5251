#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include "opentrend/labeling.hpp"

namespace opentrend {

// Label 1 is the positive class.
struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + tn + fp + fn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion(std::span<const Label> y_true, std::span<const Label> y_pred);

double accuracy(const ConfusionMatrix& cm);

// Matthews correlation coefficient. Zero when any marginal is empty.
double mcc(const ConfusionMatrix& cm);

struct EffectivenessThresholds {
  double accuracy = 0.8;
  double mcc = 0.65;

  bool effective(double acc, double m) const { return acc >= accuracy && m >= mcc; }
};

struct EvalRecord {
  std::string market;
  std::string task;
  std::string feature_set;
  std::string classifier;
  double accuracy = 0.0;
  double mcc = 0.0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  bool effective = false;
};

EvalRecord make_record(std::string market, std::string task, std::string feature_set,
                       std::string classifier, const ConfusionMatrix& cm, std::size_t n_train,
                       const EffectivenessThresholds& thresholds = {});

}  // namespace opentrend
