#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "opentrend/indicators.hpp"
#include "opentrend/ohlc.hpp"

namespace opentrend {

struct NowcastFeatures {
  double r_hi = 0.0;  // ln(high/open) >= 0
  double r_lo = 0.0;  // ln(low/open) <= 0
  double r_cl = 0.0;  // ln(close/open)
};

NowcastFeatures nowcast(const OhlcBar& bar);

inline constexpr std::size_t kIntrinsicCount = 4;
inline constexpr std::size_t kHistoricalCount = 9;
inline constexpr std::size_t kNowcastCount = 3;
inline constexpr std::size_t kFeatureCount = kIntrinsicCount + kHistoricalCount + kNowcastCount;

// open,high,low,close,dc_u,dc_l,dc_m,bb_u,bb_l,bb_m,kc_u,kc_l,kc_m,r_hi,r_lo,r_cl
const std::array<std::string_view, kFeatureCount>& canonical_columns();

struct FeatureRow {
  Date date;
  std::array<double, kIntrinsicCount> intrinsic{};
  // Donchian, Bollinger, Keltner; each as upper, lower, middle.
  std::array<double, kHistoricalCount> historical{};
  NowcastFeatures now;

  // All 16 values in canonical column order.
  std::array<double, kFeatureCount> values() const;
};

// One row per day from params.first_defined_index() onward. Row t only uses
// bars 0..t, so truncating the series never changes earlier rows.
std::vector<FeatureRow> assemble(const OhlcSeries& series, const IndicatorParams& params);

// Which feature genres (and which historical channels) to keep.
struct FeatureSetMask {
  bool intrinsic = false;
  bool donchian = false;
  bool bollinger = false;
  bool keltner = false;
  bool nowcast = false;

  static FeatureSetMask all();

  // '+'-separated tokens from {INT, HIST, DC, BB, KC, NOW, ALL}, e.g.
  // "INT+HIST+NOW" or "INT+BB". Case-insensitive.
  static FeatureSetMask parse(std::string_view text);

  bool empty() const { return !(intrinsic || donchian || bollinger || keltner || nowcast); }

  // Canonical name, e.g. "INT+HIST+NOW" when all three channels are kept.
  std::string name() const;

  // Canonical column indices kept by this mask, ascending.
  std::vector<std::size_t> columns() const;

  bool operator==(const FeatureSetMask&) const = default;
};

// The four coarse sets: INT, INT+HIST, INT+NOW, INT+HIST+NOW.
std::vector<FeatureSetMask> default_feature_sets();

// Non-owning row-major view of a dense matrix.
struct MatrixView {
  std::span<const double> data;
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::span<const double> row(std::size_t i) const { return data.subspan(i * cols, cols); }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

// Dense, immutable feature matrix with named columns and one date per row.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::vector<std::string> columns, std::vector<Date> dates,
                std::vector<double> values);

  std::size_t rows() const { return dates_.size(); }
  std::size_t cols() const { return columns_.size(); }
  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<Date>& dates() const { return dates_; }
  std::span<const double> values() const { return values_; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values_).subspan(i * cols(), cols());
  }
  double at(std::size_t i, std::size_t j) const { return values_[i * cols() + j]; }
  MatrixView view() const { return {values_, rows(), cols()}; }

  // Rows [begin, end).
  FeatureMatrix slice(std::size_t begin, std::size_t end) const;
  FeatureMatrix take(std::span<const std::size_t> indices) const;

 private:
  std::vector<std::string> columns_;
  std::vector<Date> dates_;
  std::vector<double> values_;
};

FeatureMatrix select(std::span<const FeatureRow> rows, const FeatureSetMask& mask);

// `date,<columns...>[,y_op,y_hi,y_lo,y_cl]`. Label columns are written when
// `labels` is non-empty; each label vector may be one shorter than the matrix
// (the final day has no next-day open), leaving that cell blank.
void write_feature_csv(std::ostream& out, const FeatureMatrix& matrix,
                       std::span<const std::vector<unsigned char>> labels = {},
                       std::span<const std::string> label_names = {});

}  // namespace opentrend
