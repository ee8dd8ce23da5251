#include "opentrend/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace opentrend {

NowcastFeatures nowcast(const OhlcBar& bar) {
  if (!(bar.open > 0 && bar.high > 0 && bar.low > 0 && bar.close > 0)) {
    throw DataError("nowcast: non-positive price at " + bar.date.to_string());
  }
  return {std::log(bar.high / bar.open), std::log(bar.low / bar.open),
          std::log(bar.close / bar.open)};
}

const std::array<std::string_view, kFeatureCount>& canonical_columns() {
  static constexpr std::array<std::string_view, kFeatureCount> kColumns = {
      "open", "high", "low",  "close", "dc_u", "dc_l", "dc_m", "bb_u",
      "bb_l", "bb_m", "kc_u", "kc_l",  "kc_m", "r_hi", "r_lo", "r_cl"};
  return kColumns;
}

std::array<double, kFeatureCount> FeatureRow::values() const {
  std::array<double, kFeatureCount> v{};
  std::copy(intrinsic.begin(), intrinsic.end(), v.begin());
  std::copy(historical.begin(), historical.end(), v.begin() + kIntrinsicCount);
  v[13] = now.r_hi;
  v[14] = now.r_lo;
  v[15] = now.r_cl;
  return v;
}

std::vector<FeatureRow> assemble(const OhlcSeries& series, const IndicatorParams& params) {
  params.validate();
  const std::size_t first = params.first_defined_index();
  if (series.size() < first + 1) {
    throw DataError("series of length " + std::to_string(series.size()) +
                    " too short for window " + std::to_string(params.window_n));
  }
  const BandSeries dc = donchian(series, params.window_n);
  const BandSeries bb = bollinger(series, params);
  const BandSeries kc = keltner(series, params);

  std::vector<FeatureRow> rows;
  rows.reserve(series.size() - first);
  for (std::size_t t = first; t < series.size(); ++t) {
    const OhlcBar& bar = series[t];
    FeatureRow row;
    row.date = bar.date;
    row.intrinsic = {bar.open, bar.high, bar.low, bar.close};
    std::size_t k = 0;
    for (const BandSeries* bands : {&dc, &bb, &kc}) {
      const BandTriple& b = *(*bands)[t];
      row.historical[k++] = b.upper;
      row.historical[k++] = b.lower;
      row.historical[k++] = b.middle;
    }
    row.now = nowcast(bar);
    rows.push_back(row);
  }
  return rows;
}

FeatureSetMask FeatureSetMask::all() { return {true, true, true, true, true}; }

FeatureSetMask FeatureSetMask::parse(std::string_view text) {
  FeatureSetMask mask;
  std::string_view rest = text;
  while (true) {
    const auto plus = rest.find('+');
    std::string token(rest.substr(0, plus));
    token.erase(std::remove_if(token.begin(), token.end(),
                               [](unsigned char c) { return std::isspace(c) != 0; }),
                token.end());
    for (auto& c : token) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (token == "INT") {
      mask.intrinsic = true;
    } else if (token == "HIST") {
      mask.donchian = mask.bollinger = mask.keltner = true;
    } else if (token == "DC") {
      mask.donchian = true;
    } else if (token == "BB") {
      mask.bollinger = true;
    } else if (token == "KC") {
      mask.keltner = true;
    } else if (token == "NOW") {
      mask.nowcast = true;
    } else if (token == "ALL") {
      mask = all();
    } else {
      throw std::invalid_argument("unknown feature-set token '" + token + "' in '" +
                                  std::string(text) + "'");
    }
    if (plus == std::string_view::npos) break;
    rest.remove_prefix(plus + 1);
  }
  if (mask.empty()) throw std::invalid_argument("empty feature set");
  return mask;
}

std::string FeatureSetMask::name() const {
  std::vector<std::string_view> parts;
  if (intrinsic) parts.push_back("INT");
  if (donchian && bollinger && keltner) {
    parts.push_back("HIST");
  } else {
    if (donchian) parts.push_back("DC");
    if (bollinger) parts.push_back("BB");
    if (keltner) parts.push_back("KC");
  }
  if (nowcast) parts.push_back("NOW");
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += '+';
    out += parts[i];
  }
  return out;
}

std::vector<std::size_t> FeatureSetMask::columns() const {
  std::vector<std::size_t> cols;
  const auto add = [&cols](std::size_t from, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) cols.push_back(from + i);
  };
  if (intrinsic) add(0, 4);
  if (donchian) add(4, 3);
  if (bollinger) add(7, 3);
  if (keltner) add(10, 3);
  if (nowcast) add(13, 3);
  return cols;
}

std::vector<FeatureSetMask> default_feature_sets() {
  return {FeatureSetMask::parse("INT"), FeatureSetMask::parse("INT+HIST"),
          FeatureSetMask::parse("INT+NOW"), FeatureSetMask::parse("INT+HIST+NOW")};
}

FeatureMatrix::FeatureMatrix(std::vector<std::string> columns, std::vector<Date> dates,
                             std::vector<double> values)
    : columns_(std::move(columns)), dates_(std::move(dates)), values_(std::move(values)) {
  if (values_.size() != columns_.size() * dates_.size()) {
    throw std::invalid_argument("FeatureMatrix: value count does not match shape");
  }
}

FeatureMatrix FeatureMatrix::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > rows()) throw std::out_of_range("FeatureMatrix::slice");
  std::vector<Date> d(dates_.begin() + static_cast<std::ptrdiff_t>(begin),
                      dates_.begin() + static_cast<std::ptrdiff_t>(end));
  std::vector<double> v(values_.begin() + static_cast<std::ptrdiff_t>(begin * cols()),
                        values_.begin() + static_cast<std::ptrdiff_t>(end * cols()));
  return FeatureMatrix(columns_, std::move(d), std::move(v));
}

FeatureMatrix FeatureMatrix::take(std::span<const std::size_t> indices) const {
  std::vector<Date> d;
  std::vector<double> v;
  d.reserve(indices.size());
  v.reserve(indices.size() * cols());
  for (std::size_t i : indices) {
    if (i >= rows()) throw std::out_of_range("FeatureMatrix::take");
    d.push_back(dates_[i]);
    const auto r = row(i);
    v.insert(v.end(), r.begin(), r.end());
  }
  return FeatureMatrix(columns_, std::move(d), std::move(v));
}

FeatureMatrix select(std::span<const FeatureRow> rows, const FeatureSetMask& mask) {
  if (mask.empty()) throw std::invalid_argument("select: empty feature mask");
  if (rows.empty()) throw std::invalid_argument("select: no feature rows");
  const std::vector<std::size_t> cols = mask.columns();
  std::vector<std::string> names;
  for (std::size_t c : cols) names.emplace_back(canonical_columns()[c]);
  std::vector<Date> dates;
  std::vector<double> values;
  dates.reserve(rows.size());
  values.reserve(rows.size() * cols.size());
  for (const FeatureRow& r : rows) {
    dates.push_back(r.date);
    const auto all = r.values();
    for (std::size_t c : cols) values.push_back(all[c]);
  }
  return FeatureMatrix(std::move(names), std::move(dates), std::move(values));
}

void write_feature_csv(std::ostream& out, const FeatureMatrix& matrix,
                       std::span<const std::vector<unsigned char>> labels,
                       std::span<const std::string> label_names) {
  if (labels.size() != label_names.size()) {
    throw std::invalid_argument("write_feature_csv: label/name count mismatch");
  }
  out << "date";
  for (const auto& c : matrix.columns()) out << ',' << c;
  for (const auto& n : label_names) out << ',' << n;
  out << '\n';
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    out << matrix.dates()[i].to_string();
    for (double v : matrix.row(i)) out << ',' << format_double(v);
    for (const auto& l : labels) {
      out << ',';
      if (i < l.size()) out << static_cast<int>(l[i]);
    }
    out << '\n';
  }
}

}  // namespace opentrend
