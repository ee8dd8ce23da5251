#include "opentrend/ohlc.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <system_error>

namespace opentrend {
namespace {

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static constexpr int kDays[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return (m == 2 && is_leap(y)) ? 29 : kDays[m - 1];
}

std::string_view trim(std::string_view s) {
  const auto blank = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && blank(s.front())) s.remove_prefix(1);
  while (!s.empty() && blank(s.back())) s.remove_suffix(1);
  return s;
}

int parse_digits(std::string_view s) {
  int value = 0;
  for (char c : s) {
    if (c < '0' || c > '9') throw DataError("bad date '" + std::string(s) + "'");
    value = value * 10 + (c - '0');
  }
  return value;
}

double parse_price(std::string_view text, std::size_t line_no) {
  const std::string_view s = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw DataError("malformed price '" + std::string(s) + "' at line " + std::to_string(line_no));
  }
  return value;
}

}  // namespace

Date Date::parse(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw DataError("bad date '" + std::string(text) + "'");
  }
  Date d{parse_digits(text.substr(0, 4)), parse_digits(text.substr(5, 2)),
         parse_digits(text.substr(8, 2))};
  if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > days_in_month(d.year, d.month)) {
    throw DataError("bad date '" + std::string(text) + "'");
  }
  return d;
}

// Civil-from-days / days-from-civil after H. Hinnant's public-domain algorithms.
std::int64_t Date::to_days() const {
  const std::int64_t y = year - (month <= 2 ? 1 : 0);
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const std::int64_t yoe = y - era * 400;
  const std::int64_t mp = (month + 9) % 12;
  const std::int64_t doy = (153 * mp + 2) / 5 + day - 1;
  const std::int64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + doe - 719468;
}

Date Date::from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const std::int64_t doe = z - era * 146097;
  const std::int64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const std::int64_t mp = (5 * doy + 2) / 153;
  const int d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  const int m = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
  const int y = static_cast<int>(yoe + era * 400 + (m <= 2 ? 1 : 0));
  return Date{y, m, d};
}

int Date::weekday() const {
  const std::int64_t days = to_days();  // 1970-01-01 was a Thursday
  return static_cast<int>(((days % 7) + 7 + 3) % 7);
}

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  return buf;
}

double price_of(const OhlcBar& bar, PriceField field) {
  switch (field) {
    case PriceField::Open: return bar.open;
    case PriceField::High: return bar.high;
    case PriceField::Low: return bar.low;
    case PriceField::Close: return bar.close;
  }
  return bar.close;
}

PriceField parse_price_field(std::string_view name) {
  if (name == "open") return PriceField::Open;
  if (name == "high") return PriceField::High;
  if (name == "low") return PriceField::Low;
  if (name == "close") return PriceField::Close;
  throw std::invalid_argument("unknown price field '" + std::string(name) + "'");
}

void validate_bar(const OhlcBar& b) {
  const bool finite = std::isfinite(b.open) && std::isfinite(b.high) && std::isfinite(b.low) &&
                      std::isfinite(b.close);
  const bool positive = b.open > 0 && b.high > 0 && b.low > 0 && b.close > 0;
  const bool ordered = b.low <= b.open && b.open <= b.high && b.low <= b.close &&
                       b.close <= b.high && b.low <= b.high;
  if (!finite || !positive || !ordered) {
    throw DataError("bar invariant violated at " + b.date.to_string());
  }
}

OhlcSeries::OhlcSeries(std::string market, std::vector<OhlcBar> bars)
    : market_(std::move(market)), bars_(std::move(bars)) {
  for (std::size_t i = 0; i < bars_.size(); ++i) {
    validate_bar(bars_[i]);
    if (i > 0 && !(bars_[i - 1].date < bars_[i].date)) {
      throw DataError("non-increasing dates at " + bars_[i].date.to_string());
    }
  }
}

std::vector<double> OhlcSeries::field(PriceField f) const {
  std::vector<double> out;
  out.reserve(bars_.size());
  for (const auto& b : bars_) out.push_back(price_of(b, f));
  return out;
}

OhlcSeries OhlcSeries::prefix(std::size_t n) const {
  if (n > bars_.size()) throw std::out_of_range("OhlcSeries::prefix beyond end");
  OhlcSeries out;
  out.market_ = market_;
  out.bars_.assign(bars_.begin(), bars_.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

OhlcSeries parse_csv(std::istream& in, std::string market) {
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  std::vector<OhlcBar> bars;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (!saw_header) {
      if (view.empty()) continue;
      if (view != "date,open,high,low,close") {
        throw DataError("expected header 'date,open,high,low,close', got '" + std::string(view) +
                        "'");
      }
      saw_header = true;
      continue;
    }
    if (view.empty()) continue;

    std::vector<std::string_view> fields;
    std::string_view rest = view;
    for (auto comma = rest.find(','); comma != std::string_view::npos; comma = rest.find(',')) {
      fields.push_back(rest.substr(0, comma));
      rest.remove_prefix(comma + 1);
    }
    fields.push_back(rest);
    if (fields.size() != 5) {
      throw DataError("malformed row at line " + std::to_string(line_no) + ": expected 5 fields");
    }
    OhlcBar bar;
    try {
      bar.date = Date::parse(trim(fields[0]));
    } catch (const DataError& e) {
      throw DataError(std::string(e.what()) + " at line " + std::to_string(line_no));
    }
    bar.open = parse_price(fields[1], line_no);
    bar.high = parse_price(fields[2], line_no);
    bar.low = parse_price(fields[3], line_no);
    bar.close = parse_price(fields[4], line_no);
    validate_bar(bar);
    if (!bars.empty() && !(bars.back().date < bar.date)) {
      throw DataError("non-increasing dates at line " + std::to_string(line_no) + " (" +
                      bar.date.to_string() + ")");
    }
    bars.push_back(bar);
  }
  if (!saw_header) throw DataError("empty input: no header");
  if (bars.empty()) throw DataError("empty input: no data rows");
  return OhlcSeries(std::move(market), std::move(bars));
}

OhlcSeries parse_csv_text(std::string_view text, std::string market) {
  std::istringstream in{std::string(text)};
  return parse_csv(in, std::move(market));
}

OhlcSeries read_csv_file(const std::filesystem::path& path, std::string market) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  if (market.empty()) market = path.stem().string();
  return parse_csv(in, std::move(market));
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const OhlcSeries& series) {
  out << "date,open,high,low,close\n";
  for (const auto& b : series.bars()) {
    out << b.date.to_string() << ',' << format_double(b.open) << ',' << format_double(b.high)
        << ',' << format_double(b.low) << ',' << format_double(b.close) << '\n';
  }
}

std::string to_csv(const OhlcSeries& series) {
  std::ostringstream out;
  write_csv(out, series);
  return out.str();
}

VolatilityStats volatility(const OhlcSeries& series, PriceField field, int period_days) {
  if (period_days <= 0) throw std::invalid_argument("period_days must be positive");
  if (series.size() < 3) throw DataError("volatility needs at least 3 bars");
  const std::vector<double> p = series.field(field);
  VolatilityStats stats;
  stats.period_days = period_days;
  stats.log_returns.reserve(p.size() - 1);
  for (std::size_t t = 1; t < p.size(); ++t) {
    if (!(p[t] > 0 && p[t - 1] > 0)) throw DataError("non-positive price in volatility");
    stats.log_returns.push_back(std::log(p[t] / p[t - 1]));
  }
  const auto n = static_cast<double>(stats.log_returns.size());
  double sum = 0.0;
  for (double r : stats.log_returns) sum += r;
  stats.mean_return = sum / n;
  double ss = 0.0;
  for (double r : stats.log_returns) ss += (r - stats.mean_return) * (r - stats.mean_return);
  stats.variance = ss / (n - 1.0);
  stats.daily_volatility = std::sqrt(stats.variance);
  stats.periodized_volatility = stats.daily_volatility * std::sqrt(static_cast<double>(period_days));
  return stats;
}

}  // namespace opentrend
