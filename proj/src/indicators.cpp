#include "opentrend/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <string>

namespace opentrend {
namespace {

void check_window(std::size_t length, int n) {
  if (n <= 0) throw std::invalid_argument("window must be positive, got " + std::to_string(n));
  if (length < static_cast<std::size_t>(n)) {
    throw std::invalid_argument("input of length " + std::to_string(length) +
                                " shorter than window " + std::to_string(n));
  }
}

}  // namespace

std::string_view band_kind_name(BandKind kind) {
  switch (kind) {
    case BandKind::Donchian: return "donchian";
    case BandKind::Bollinger: return "bollinger";
    case BandKind::Keltner: return "keltner";
  }
  return "unknown";
}

void IndicatorParams::validate() const {
  if (window_n <= 0) throw std::invalid_argument("window_n must be positive");
  if (!(bollinger_k >= 0.0) || !std::isfinite(bollinger_k)) {
    throw std::invalid_argument("bollinger_k must be finite and non-negative");
  }
  if (!(keltner_k >= 0.0) || !std::isfinite(keltner_k)) {
    throw std::invalid_argument("keltner_k must be finite and non-negative");
  }
}

std::size_t IndicatorParams::first_defined_index() const {
  const auto n = static_cast<std::size_t>(window_n);
  // The literal Bollinger variant needs SMA_n(i) for every i in the window.
  return bollinger_paper_literal ? 2 * n - 2 : n - 1;
}

MaybeSeries sma(std::span<const double> closes, int n) {
  check_window(closes.size(), n);
  const auto w = static_cast<std::size_t>(n);
  MaybeSeries out(closes.size());
  double sum = 0.0;
  for (std::size_t t = 0; t < closes.size(); ++t) {
    sum += closes[t];
    if (t >= w) sum -= closes[t - w];
    if (t + 1 >= w) out[t] = sum / n;
  }
  return out;
}

MaybeSeries ema(std::span<const double> closes, int n) {
  check_window(closes.size(), n);
  const auto w = static_cast<std::size_t>(n);
  const double alpha = 2.0 / (n + 1.0);
  MaybeSeries out(closes.size());
  double seed = 0.0;
  for (std::size_t i = 0; i < w; ++i) seed += closes[i];
  double value = seed / n;
  out.at(w - 1) = value;
  for (std::size_t t = w; t < closes.size(); ++t) {
    value = alpha * closes[t] + (1.0 - alpha) * value;
    out[t] = value;
  }
  return out;
}

std::vector<double> true_range(const OhlcSeries& series) {
  if (series.empty()) throw std::invalid_argument("true_range of empty series");
  std::vector<double> tr(series.size());
  tr[0] = series[0].high - series[0].low;
  for (std::size_t t = 1; t < series.size(); ++t) {
    const auto& bar = series[t];
    const double prev_close = series[t - 1].close;
    tr[t] = std::max({bar.high - bar.low, std::abs(bar.high - prev_close),
                      std::abs(bar.low - prev_close)});
  }
  return tr;
}

MaybeSeries atr(const OhlcSeries& series, int n) {
  check_window(series.size(), n);
  const std::vector<double> tr = true_range(series);
  return sma(tr, n);
}

BandSeries donchian(const OhlcSeries& series, int n) {
  check_window(series.size(), n);
  const auto w = static_cast<std::size_t>(n);
  BandSeries out(series.size());
  // Monotonic deques of indices: front holds the window max high / min low.
  std::deque<std::size_t> highs;
  std::deque<std::size_t> lows;
  for (std::size_t t = 0; t < series.size(); ++t) {
    while (!highs.empty() && series[highs.back()].high <= series[t].high) highs.pop_back();
    highs.push_back(t);
    while (!lows.empty() && series[lows.back()].low >= series[t].low) lows.pop_back();
    lows.push_back(t);
    if (highs.front() + w <= t) highs.pop_front();
    if (lows.front() + w <= t) lows.pop_front();
    if (t + 1 >= w) {
      const double upper = series[highs.front()].high;
      const double lower = series[lows.front()].low;
      out[t] = BandTriple{upper, (upper + lower) / 2.0, lower, BandKind::Donchian};
    }
  }
  return out;
}

BandSeries bollinger(const OhlcSeries& series, const IndicatorParams& params) {
  params.validate();
  const int n = params.window_n;
  check_window(series.size(), n);
  const auto w = static_cast<std::size_t>(n);
  const std::vector<double> closes = series.closes();
  const MaybeSeries mid = sma(closes, n);
  const std::size_t first = params.first_defined_index();
  BandSeries out(series.size());
  for (std::size_t t = first; t < series.size(); ++t) {
    const double center = *mid[t];
    double ss = 0.0;
    for (std::size_t i = t + 1 - w; i <= t; ++i) {
      const double c = params.bollinger_paper_literal ? *mid[i] : center;
      ss += (closes[i] - c) * (closes[i] - c);
    }
    const double sigma = std::sqrt(ss / n);
    out[t] = BandTriple{center + params.bollinger_k * sigma, center,
                        center - params.bollinger_k * sigma, BandKind::Bollinger};
  }
  return out;
}

BandSeries keltner(const OhlcSeries& series, const IndicatorParams& params) {
  params.validate();
  const int n = params.window_n;
  check_window(series.size(), n);
  const std::vector<double> closes = series.closes();
  const MaybeSeries mid = ema(closes, n);
  const MaybeSeries range = atr(series, n);
  BandSeries out(series.size());
  for (std::size_t t = static_cast<std::size_t>(n) - 1; t < series.size(); ++t) {
    const double m = *mid[t];
    const double a = *range[t];
    out[t] = BandTriple{m + params.keltner_k * a, m, m - params.keltner_k * a, BandKind::Keltner};
  }
  return out;
}

}  // namespace opentrend
