#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace opentrend {

// Raised for malformed or invariant-violating input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Proleptic Gregorian calendar date.
struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  // Strict YYYY-MM-DD.
  static Date parse(std::string_view text);
  static Date from_days(std::int64_t days_since_epoch);

  std::int64_t to_days() const;
  // 0 = Monday ... 6 = Sunday.
  int weekday() const;
  std::string to_string() const;

  auto operator<=>(const Date&) const = default;
};

struct OhlcBar {
  Date date;
  double open = 0.0;
  double high = 0.0;
  double low = 0.0;
  double close = 0.0;
};

enum class PriceField { Open, High, Low, Close };

double price_of(const OhlcBar& bar, PriceField field);
PriceField parse_price_field(std::string_view name);

// Throws DataError("bar invariant violated at <date>") on non-positive,
// non-finite or inconsistent prices.
void validate_bar(const OhlcBar& bar);

// Immutable, validated daily series: every bar satisfies the OHLC ordering and
// dates are strictly increasing.
class OhlcSeries {
 public:
  OhlcSeries() = default;
  OhlcSeries(std::string market, std::vector<OhlcBar> bars);

  const std::string& market() const { return market_; }
  std::span<const OhlcBar> bars() const { return bars_; }
  std::size_t size() const { return bars_.size(); }
  bool empty() const { return bars_.empty(); }
  const OhlcBar& operator[](std::size_t i) const { return bars_[i]; }

  std::vector<double> field(PriceField f) const;
  std::vector<double> closes() const { return field(PriceField::Close); }

  // First n bars (n <= size()).
  OhlcSeries prefix(std::size_t n) const;

 private:
  std::string market_;
  std::vector<OhlcBar> bars_;
};

// CSV ingestion. Header must be exactly `date,open,high,low,close`; LF or CRLF
// line endings; fields may carry surrounding blanks. Out-of-order dates are an
// error, never silently sorted.
OhlcSeries parse_csv(std::istream& in, std::string market = {});
OhlcSeries parse_csv_text(std::string_view text, std::string market = {});
OhlcSeries read_csv_file(const std::filesystem::path& path, std::string market = {});

void write_csv(std::ostream& out, const OhlcSeries& series);
std::string to_csv(const OhlcSeries& series);

// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

struct VolatilityStats {
  std::vector<double> log_returns;
  double mean_return = 0.0;
  double variance = 0.0;
  double daily_volatility = 0.0;
  double periodized_volatility = 0.0;
  int period_days = 252;
};

// Log-return volatility of one price field: r(t) = ln(P(t)/P(t-1)), unbiased
// sample variance (divisor N-1), daily vol = sqrt(variance), periodized vol =
// daily * sqrt(period_days). Needs at least 3 bars.
VolatilityStats volatility(const OhlcSeries& series, PriceField field = PriceField::Close,
                           int period_days = 252);

}  // namespace opentrend
