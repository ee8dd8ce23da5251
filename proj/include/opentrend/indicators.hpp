#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "opentrend/ohlc.hpp"

namespace opentrend {

// Indicator outputs keep warm-up positions as std::nullopt, never as zero.
using MaybeSeries = std::vector<std::optional<double>>;

enum class BandKind { Donchian, Bollinger, Keltner };

std::string_view band_kind_name(BandKind kind);

struct BandTriple {
  double upper = 0.0;
  double middle = 0.0;
  double lower = 0.0;
  BandKind kind = BandKind::Donchian;
};

using BandSeries = std::vector<std::optional<BandTriple>>;

struct IndicatorParams {
  int window_n = 20;
  double bollinger_k = 2.0;
  double keltner_k = 2.0;
  // Center each squared deviation on SMA_n(i) at the deviation's own index
  // instead of on SMA_n(t). Off by default (conventional Bollinger bands).
  bool bollinger_paper_literal = false;

  double ema_alpha() const { return 2.0 / (window_n + 1.0); }

  // Throws std::invalid_argument on n <= 0 or negative multipliers.
  void validate() const;

  // Index of the first bar at which every channel is defined.
  std::size_t first_defined_index() const;
};

MaybeSeries sma(std::span<const double> closes, int n);

// Seeded with the SMA of the first n values at index n-1, then
// EMA(t) = a*P(t) + (1-a)*EMA(t-1) with a = 2/(n+1).
MaybeSeries ema(std::span<const double> closes, int n);

// TR(0) = high - low; later bars also consider the previous close.
std::vector<double> true_range(const OhlcSeries& series);

// Window mean of the true range.
MaybeSeries atr(const OhlcSeries& series, int n);

BandSeries donchian(const OhlcSeries& series, int n);
BandSeries bollinger(const OhlcSeries& series, const IndicatorParams& params);
BandSeries keltner(const OhlcSeries& series, const IndicatorParams& params);

}  // namespace opentrend
