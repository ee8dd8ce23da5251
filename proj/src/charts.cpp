#include "opentrend/charts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "opentrend/report.hpp"

namespace opentrend {
namespace {

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string px(double v) { return fmt("%.2f", v); }

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string svg_open(double width, double height) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         px(width) + "\" height=\"" + px(height) + "\" viewBox=\"0 0 " + px(width) + ' ' +
         px(height) + "\" font-family=\"sans-serif\">\n";
}

std::string metadata(const Provenance& p) {
  return "<metadata>opentrend " + xml_escape(p.tool_version) + " config_hash=" +
         xml_escape(p.config_hash) + " seed=" + std::to_string(p.seed) + "</metadata>\n";
}

std::string text(double x, double y, std::string_view body, std::string_view extra = "") {
  std::string out = "<text x=\"" + px(x) + "\" y=\"" + px(y) + "\" font-size=\"12\"";
  if (!extra.empty()) {
    out += ' ';
    out += extra;
  }
  return out + ">" + xml_escape(body) + "</text>\n";
}

void push_unique(std::vector<std::string>& list, const std::string& item) {
  if (std::find(list.begin(), list.end(), item) == list.end()) list.push_back(item);
}

}  // namespace

std::string_view chart_metric_name(ChartMetric metric) {
  return metric == ChartMetric::Accuracy ? "accuracy" : "mcc";
}

ChartMetric parse_chart_metric(std::string_view name) {
  if (name == "accuracy" || name == "acc") return ChartMetric::Accuracy;
  if (name == "mcc") return ChartMetric::Mcc;
  throw std::invalid_argument("unknown chart metric '" + std::string(name) + "'");
}

double metric_norm(ChartMetric metric, double value) {
  const double norm = metric == ChartMetric::Accuracy ? value : (value + 1.0) / 2.0;
  if (std::isnan(norm)) return 0.0;
  return std::clamp(norm, 0.0, 1.0);
}

double bubble_radius(double norm, const BubbleScale& scale) {
  return scale.r_min + (scale.r_max - scale.r_min) * std::clamp(norm, 0.0, 1.0);
}

std::string bubble_fill(double norm) {
  // Pale blue (#deebf7) at 0 to dark navy (#08306b) at 1.
  const double t = std::clamp(norm, 0.0, 1.0);
  const auto lerp = [t](int a, int b) {
    return static_cast<int>(std::lround(a + (b - a) * t));
  };
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", lerp(0xde, 0x08), lerp(0xeb, 0x30),
                lerp(0xf7, 0x6b));
  return buf;
}

std::string bubble_chart_svg(std::span<const EvalRecord> records, std::string_view market,
                             std::string_view task, ChartMetric metric,
                             std::span<const std::string> classifiers,
                             std::span<const std::string> feature_sets,
                             const Provenance& provenance, const BubbleScale& scale) {
  const double cell = 2.0 * scale.r_max + 16.0;
  const double left = 130.0;
  const double top = 50.0;
  const double grid_w = cell * static_cast<double>(classifiers.size());
  const double grid_h = cell * static_cast<double>(feature_sets.size());
  const double legend_y = top + grid_h + 50.0;
  const double width = left + std::max(grid_w, 5 * cell) + 20.0;
  const double height = legend_y + cell + 10.0;

  const std::string metric_label = metric == ChartMetric::Accuracy ? "Accuracy" : "MCC";
  std::string svg = svg_open(width, height);
  svg += metadata(provenance);
  svg += text(10, 20,
              metric_label + " | market " + std::string(market) + " | task " + std::string(task),
              "font-weight=\"bold\"");

  for (std::size_t c = 0; c < classifiers.size(); ++c) {
    svg += text(left + cell * (c + 0.5), top + grid_h + 18, classifiers[c], "text-anchor=\"middle\"");
  }
  for (std::size_t f = 0; f < feature_sets.size(); ++f) {
    svg += text(left - 8, top + cell * (f + 0.5) + 4, feature_sets[f], "text-anchor=\"end\"");
  }
  svg += "<rect x=\"" + px(left) + "\" y=\"" + px(top) + "\" width=\"" + px(grid_w) +
         "\" height=\"" + px(grid_h) + "\" fill=\"none\" stroke=\"#bbbbbb\"/>\n";

  for (std::size_t f = 0; f < feature_sets.size(); ++f) {
    for (std::size_t c = 0; c < classifiers.size(); ++c) {
      const auto it = std::find_if(records.begin(), records.end(), [&](const EvalRecord& r) {
        return r.market == market && r.task == task && r.feature_set == feature_sets[f] &&
               r.classifier == classifiers[c];
      });
      if (it == records.end()) continue;
      const double value = metric == ChartMetric::Accuracy ? it->accuracy : it->mcc;
      const double norm = metric_norm(metric, value);
      svg += "<circle cx=\"" + px(left + cell * (c + 0.5)) + "\" cy=\"" +
             px(top + cell * (f + 0.5)) + "\" r=\"" + px(bubble_radius(norm, scale)) +
             "\" fill=\"" + bubble_fill(norm) + "\"><title>" + xml_escape(classifiers[c]) + " " +
             xml_escape(feature_sets[f]) + " " + fmt("%.4f", value) + "</title></circle>\n";
    }
  }

  // Legend: five reference values spanning the scale.
  svg += text(10, legend_y + cell / 2 + 4, "Legend");
  for (int k = 0; k <= 4; ++k) {
    const double norm = k / 4.0;
    const double value = metric == ChartMetric::Accuracy ? norm : 2.0 * norm - 1.0;
    const double cx = left + cell * (k + 0.5);
    svg += "<circle cx=\"" + px(cx) + "\" cy=\"" + px(legend_y + cell / 2) + "\" r=\"" +
           px(bubble_radius(norm, scale)) + "\" fill=\"" + bubble_fill(norm) + "\"/>\n";
    svg += text(cx, legend_y + cell + 4, fmt("%.2f", value), "text-anchor=\"middle\"");
  }
  svg += "</svg>\n";
  return svg;
}

std::vector<ChartFile> bubble_charts(const ResultsBundle& bundle, ChartMetric metric) {
  std::vector<std::string> classifiers;
  std::vector<std::string> feature_sets;
  std::vector<std::pair<std::string, std::string>> cells;
  for (const auto& r : bundle.records) {
    push_unique(classifiers, r.classifier);
    push_unique(feature_sets, r.feature_set);
    const std::pair<std::string, std::string> key{r.market, r.task};
    if (std::find(cells.begin(), cells.end(), key) == cells.end()) cells.push_back(key);
  }
  std::vector<ChartFile> out;
  for (const auto& [market, task] : cells) {
    out.push_back({"chart_" + file_token(market) + "_" + file_token(task) + "_" +
                       std::string(chart_metric_name(metric)) + ".svg",
                   bubble_chart_svg(bundle.records, market, task, metric, classifiers,
                                    feature_sets, bundle.provenance)});
  }
  return out;
}

std::string shapley_bar_svg(const ShapleyEntry& entry, const Provenance& provenance) {
  const auto& names = entry.report.feature_names;
  const auto& values = entry.report.global_importance;
  const double left = 90.0;
  const double top = 50.0;
  const double bar_h = 18.0;
  const double gap = 6.0;
  const double bar_w = 360.0;
  const double height = top + (bar_h + gap) * static_cast<double>(names.size()) + 30.0;
  const double width = left + bar_w + 90.0;
  double peak = 0.0;
  for (double v : values) peak = std::max(peak, v);

  std::string svg = svg_open(width, height);
  svg += metadata(provenance);
  svg += text(10, 20,
              "Mean |Shapley value| | market " + entry.market + " | task " +
                  std::string(task_name(entry.task)) + " | model " + entry.report.model,
              "font-weight=\"bold\"");
  for (std::size_t j = 0; j < names.size(); ++j) {
    const double y = top + (bar_h + gap) * static_cast<double>(j);
    const double w = peak > 0.0 ? bar_w * values[j] / peak : 0.0;
    svg += text(left - 8, y + bar_h - 5, names[j], "text-anchor=\"end\"");
    svg += "<rect x=\"" + px(left) + "\" y=\"" + px(y) + "\" width=\"" + px(w) + "\" height=\"" +
           px(bar_h) + "\" fill=\"" + bubble_fill(peak > 0.0 ? values[j] / peak : 0.0) + "\"/>\n";
    svg += text(left + w + 6, y + bar_h - 5, fmt("%.4g", values[j]));
  }
  svg += text(10, height - 10,
              "Legend: bar length and darkness scale with importance relative to the top feature");
  svg += "</svg>\n";
  return svg;
}

std::vector<ChartFile> all_charts(const ResultsBundle& bundle) {
  std::vector<ChartFile> out = bubble_charts(bundle, ChartMetric::Accuracy);
  for (auto& chart : bubble_charts(bundle, ChartMetric::Mcc)) out.push_back(std::move(chart));
  for (const auto& entry : bundle.shapley) {
    out.push_back({"shap_" + file_token(entry.market) + "_" + std::string(task_name(entry.task)) +
                       ".svg",
                   shapley_bar_svg(entry, bundle.provenance)});
  }
  return out;
}

}  // namespace opentrend
