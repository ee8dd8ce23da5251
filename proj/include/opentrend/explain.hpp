#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "opentrend/features.hpp"
#include "opentrend/learners/model.hpp"

namespace opentrend {

// Model score of one feature vector.
using ScoreFn = std::function<double(std::span<const double>)>;

struct AttributionRow {
  Date date;
  std::vector<double> phi;
  double base_value = 0.0;    // v(empty coalition)
  double model_output = 0.0;  // score of the full row
};

enum class ShapleyMode { Exact, Sampled };

std::string_view shapley_mode_name(ShapleyMode mode);
ShapleyMode parse_shapley_mode(std::string_view name);

struct ShapleyReport {
  std::vector<std::string> feature_names;
  std::vector<double> global_importance;  // mean |phi| per feature
  ShapleyMode mode = ShapleyMode::Exact;
  std::size_t background_size = 0;
  std::size_t rows = 0;
  std::string model;  // which classifier was attributed
};

inline constexpr std::size_t kMaxExactFeatures = 20;

// Interventional Shapley values by enumerating all 2^d coalitions:
// v(S) = mean over background rows b of f(x on S, b off S).
AttributionRow shapley_exact(const ScoreFn& model, std::span<const double> row,
                             const MatrixView& background);
AttributionRow shapley_exact(const TrainedModel& model, std::span<const double> row,
                             const FeatureMatrix& background);

// Monte Carlo estimate over uniformly random feature orderings, each paired
// with one uniformly drawn background row. Deterministic in seed.
AttributionRow shapley_sampled(const ScoreFn& model, std::span<const double> row,
                               const MatrixView& background, std::size_t n_permutations,
                               std::uint64_t seed);
AttributionRow shapley_sampled(const TrainedModel& model, std::span<const double> row,
                               const FeatureMatrix& background, std::size_t n_permutations,
                               std::uint64_t seed);

struct GlobalImportanceOptions {
  ShapleyMode mode = ShapleyMode::Exact;
  std::size_t n_permutations = 1000;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

// Mean |phi| over every row of `rows`. Rows are attributed independently (in
// parallel when threads > 1); the reduction runs in row order.
ShapleyReport global_importance(const TrainedModel& model, const FeatureMatrix& rows,
                                const FeatureMatrix& background,
                                const GlobalImportanceOptions& options = {});
ShapleyReport global_importance(const ScoreFn& model, const FeatureMatrix& rows,
                                const FeatureMatrix& background,
                                const GlobalImportanceOptions& options = {});

// Seeded choice of up to `count` distinct row indices from [begin, end),
// returned in ascending order.
std::vector<std::size_t> sample_rows(std::size_t begin, std::size_t end, std::size_t count,
                                     std::uint64_t seed);

}  // namespace opentrend
