#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "opentrend/metrics.hpp"

namespace opentrend {

struct Provenance;
struct ResultsBundle;
struct ShapleyEntry;

enum class ChartMetric { Accuracy, Mcc };

std::string_view chart_metric_name(ChartMetric metric);
ChartMetric parse_chart_metric(std::string_view name);

// Accuracy maps as-is, MCC as (mcc + 1) / 2; both clamped to [0, 1].
double metric_norm(ChartMetric metric, double value);

struct BubbleScale {
  double r_min = 3.0;
  double r_max = 20.0;
};

double bubble_radius(double norm, const BubbleScale& scale = {});
// "#rrggbb" interpolated from a pale to a dark blue; darker means higher.
std::string bubble_fill(double norm);

struct ChartFile {
  std::string name;  // file name, no directory
  std::string svg;
};

// Bubble grid for one (market, task): x = classifiers, y = feature sets, in
// the given orders. Records for other cells are ignored; missing cells stay
// empty.
std::string bubble_chart_svg(std::span<const EvalRecord> records, std::string_view market,
                             std::string_view task, ChartMetric metric,
                             std::span<const std::string> classifiers,
                             std::span<const std::string> feature_sets,
                             const Provenance& provenance, const BubbleScale& scale = {});

// One chart per (market, task) present in the bundle, axes shared across
// charts in first-appearance order.
std::vector<ChartFile> bubble_charts(const ResultsBundle& bundle, ChartMetric metric);

// Horizontal bars of global importance, features in their column order.
std::string shapley_bar_svg(const ShapleyEntry& entry, const Provenance& provenance);

// Bubble charts for both metrics plus one bar chart per Shapley entry.
std::vector<ChartFile> all_charts(const ResultsBundle& bundle);

}  // namespace opentrend
