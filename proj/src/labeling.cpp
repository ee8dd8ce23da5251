#include "opentrend/labeling.hpp"

#include <stdexcept>
#include <string>

namespace opentrend {

std::string_view task_name(TaskKind task) {
  switch (task) {
    case TaskKind::OpVsOp: return "op";
    case TaskKind::OpVsHigh: return "hi";
    case TaskKind::OpVsLow: return "lo";
    case TaskKind::OpVsClose: return "cl";
  }
  return "?";
}

TaskKind parse_task(std::string_view name) {
  if (name.starts_with("y_")) name.remove_prefix(2);
  if (name == "op" || name == "OpVsOp") return TaskKind::OpVsOp;
  if (name == "hi" || name == "OpVsHigh") return TaskKind::OpVsHigh;
  if (name == "lo" || name == "OpVsLow") return TaskKind::OpVsLow;
  if (name == "cl" || name == "OpVsClose") return TaskKind::OpVsClose;
  throw std::invalid_argument("unknown task '" + std::string(name) + "'");
}

PriceField reference_field(TaskKind task) {
  switch (task) {
    case TaskKind::OpVsOp: return PriceField::Open;
    case TaskKind::OpVsHigh: return PriceField::High;
    case TaskKind::OpVsLow: return PriceField::Low;
    case TaskKind::OpVsClose: return PriceField::Close;
  }
  return PriceField::Open;
}

LabelVector make_labels(const OhlcSeries& series, TaskKind task, std::size_t first_index) {
  if (first_index + 1 >= series.size()) {
    throw DataError("make_labels: first_index " + std::to_string(first_index) +
                    " leaves no labelable day in a series of length " +
                    std::to_string(series.size()));
  }
  const PriceField ref = reference_field(task);
  LabelVector out;
  out.task = task;
  const std::size_t n = series.size() - 1 - first_index;
  out.dates.reserve(n);
  out.labels.reserve(n);
  for (std::size_t t = first_index; t + 1 < series.size(); ++t) {
    out.dates.push_back(series[t].date);
    out.labels.push_back(series[t + 1].open > price_of(series[t], ref) ? 1 : 0);
  }
  return out;
}

}  // namespace opentrend
