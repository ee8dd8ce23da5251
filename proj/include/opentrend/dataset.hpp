#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "opentrend/features.hpp"
#include "opentrend/labeling.hpp"
#include "opentrend/learners/model.hpp"

namespace opentrend {

// Features aligned with one task's labels, in chronological order.
struct LabeledDataset {
  std::string market;
  TaskKind task = TaskKind::OpVsOp;
  FeatureMatrix matrix;
  LabelVector labels;
  std::size_t n_points = 0;
};

// Accepts a matrix with one more row than labels (the unlabeled final day is
// dropped) or exactly as many. Dates must line up row for row.
LabeledDataset bind(const FeatureMatrix& matrix, LabelVector labels, std::string market);

// assemble -> select -> make_labels -> bind in one call.
LabeledDataset build_dataset(const OhlcSeries& series, const IndicatorParams& params,
                             const FeatureSetMask& mask, TaskKind task);

// Chronological split: rows [0, n_train) train, [n_train, n_points) test.
struct Split {
  std::size_t n_points = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  double ratio = 0.8;

  std::size_t train_begin() const { return 0; }
  std::size_t train_end() const { return n_train; }
  std::size_t test_begin() const { return n_train; }
  std::size_t test_end() const { return n_points; }
};

// n_train = ceil(ratio * n_points). Throws if either side would be empty.
Split split_counts(std::size_t n_points, double ratio);
Split split(const LabeledDataset& ds, double ratio);

struct EvalMode {
  enum class Kind { StaticSplit, RollingOneStep };
  Kind kind = Kind::StaticSplit;
  // RollingOneStep: refit on every refit_every-th test point and reuse the
  // most recent fit in between.
  std::size_t refit_every = 1;
  // RollingOneStep: fit on a sliding window of n_train rows instead of the
  // expanding window anchored at row 0.
  bool freeze_window = false;
};

EvalMode::Kind parse_eval_mode(std::string_view name);
std::string_view eval_mode_name(EvalMode::Kind kind);

// Predictions for the test rows. StaticSplit fits once on the train prefix.
// RollingOneStep predicts test row i from a model fitted only on rows < i.
// Fit failures are rethrown as FitError naming the window.
std::vector<Label> rolling_predict(const LabeledDataset& ds, const Split& split,
                                   const ClassifierSpec& learner, const EvalMode& mode,
                                   std::uint64_t seed);

}  // namespace opentrend
