#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "opentrend/ohlc.hpp"

namespace opentrend {

// Which price of day t the next day's open is compared against.
enum class TaskKind { OpVsOp, OpVsHigh, OpVsLow, OpVsClose };

inline constexpr std::array<TaskKind, 4> kAllTasks = {TaskKind::OpVsOp, TaskKind::OpVsHigh,
                                                      TaskKind::OpVsLow, TaskKind::OpVsClose};

// Short name: "op", "hi", "lo", "cl".
std::string_view task_name(TaskKind task);
// Accepts the short names, "y_op"-style column names and "OpVsOp"-style names.
TaskKind parse_task(std::string_view name);
PriceField reference_field(TaskKind task);

using Label = std::uint8_t;

struct LabelVector {
  TaskKind task = TaskKind::OpVsOp;
  std::vector<Date> dates;  // day t each label is attached to
  std::vector<Label> labels;

  std::size_t size() const { return labels.size(); }
};

// label(t) = 1 iff open(t+1) > ref(t), for t = first_index .. size-2. Ties are 0.
LabelVector make_labels(const OhlcSeries& series, TaskKind task, std::size_t first_index);

}  // namespace opentrend
