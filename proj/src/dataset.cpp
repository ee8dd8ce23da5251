#include "opentrend/dataset.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace opentrend {

LabeledDataset bind(const FeatureMatrix& matrix, LabelVector labels, std::string market) {
  const std::size_t n = labels.size();
  if (n == 0) throw std::invalid_argument("bind: no labeled points");
  if (matrix.rows() != n && matrix.rows() != n + 1) {
    throw std::invalid_argument("bind: length mismatch (" + std::to_string(matrix.rows()) +
                                " feature rows vs " + std::to_string(n) + " labels)");
  }
  if (labels.dates.size() != n) throw std::invalid_argument("bind: label dates missing");
  for (std::size_t i = 0; i < n; ++i) {
    if (matrix.dates()[i] != labels.dates[i]) {
      throw std::invalid_argument("bind: feature/label dates misaligned at row " +
                                  std::to_string(i));
    }
  }
  LabeledDataset ds;
  ds.market = std::move(market);
  ds.task = labels.task;
  ds.matrix = matrix.rows() == n ? matrix : matrix.slice(0, n);
  ds.labels = std::move(labels);
  ds.n_points = n;
  return ds;
}

LabeledDataset build_dataset(const OhlcSeries& series, const IndicatorParams& params,
                             const FeatureSetMask& mask, TaskKind task) {
  const std::vector<FeatureRow> rows = assemble(series, params);
  const FeatureMatrix matrix = select(rows, mask);
  LabelVector labels = make_labels(series, task, params.first_defined_index());
  return bind(matrix, std::move(labels), series.market());
}

Split split_counts(std::size_t n_points, double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("split ratio must be in (0, 1)");
  if (n_points < 2) throw std::invalid_argument("split needs at least 2 points");
  // The slack absorbs representation error, e.g. 0.8 * 10 landing just above 8.
  const double raw = ratio * static_cast<double>(n_points);
  const auto n_train = static_cast<std::size_t>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
  if (n_train == 0 || n_train >= n_points) {
    throw std::invalid_argument("degenerate split: " + std::to_string(n_train) + " train of " +
                                std::to_string(n_points));
  }
  return Split{n_points, n_train, n_points - n_train, ratio};
}

Split split(const LabeledDataset& ds, double ratio) { return split_counts(ds.n_points, ratio); }

EvalMode::Kind parse_eval_mode(std::string_view name) {
  if (name == "static" || name == "StaticSplit") return EvalMode::Kind::StaticSplit;
  if (name == "rolling" || name == "RollingOneStep") return EvalMode::Kind::RollingOneStep;
  throw std::invalid_argument("unknown eval mode '" + std::string(name) + "'");
}

std::string_view eval_mode_name(EvalMode::Kind kind) {
  return kind == EvalMode::Kind::StaticSplit ? "static" : "rolling";
}

std::vector<Label> rolling_predict(const LabeledDataset& ds, const Split& split,
                                   const ClassifierSpec& learner, const EvalMode& mode,
                                   std::uint64_t seed) {
  if (split.n_points != ds.n_points || split.n_train == 0 || split.n_test == 0) {
    throw std::invalid_argument("rolling_predict: split does not match dataset");
  }
  ClassifierSpec spec = learner;
  spec.seed = seed;
  const std::span<const Label> y(ds.labels.labels);

  const auto fit_window = [&](std::size_t begin, std::size_t end) {
    try {
      return fit(spec, ds.matrix.slice(begin, end), y.subspan(begin, end - begin));
    } catch (const std::exception& e) {
      throw FitError("fit failed for window [" + std::to_string(begin) + ", " +
                     std::to_string(end) + "): " + e.what());
    }
  };

  if (mode.kind == EvalMode::Kind::StaticSplit) {
    const TrainedModel model = fit_window(0, split.n_train);
    return model.predict(ds.matrix.slice(split.test_begin(), split.test_end()));
  }

  if (mode.refit_every == 0) throw std::invalid_argument("refit_every must be positive");
  std::vector<Label> out;
  out.reserve(split.n_test);
  std::optional<TrainedModel> model;
  for (std::size_t j = 0; j < split.n_test; ++j) {
    const std::size_t i = split.n_train + j;
    if (j % mode.refit_every == 0) {
      const std::size_t begin = mode.freeze_window ? i - split.n_train : 0;
      model.emplace(fit_window(begin, i));
    }
    out.push_back(threshold_label(model->scores(ds.matrix.slice(i, i + 1))[0]));
  }
  return out;
}

}  // namespace opentrend
