#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "opentrend/ohlc.hpp"

namespace opentrend {

enum class GenKind { GeometricRandomWalk, TrendWithNoise, ConstantMarket, SeparableRegime };

std::string_view gen_kind_name(GenKind kind);
GenKind parse_gen_kind(std::string_view name);

struct GenSpec {
  GenKind kind = GenKind::GeometricRandomWalk;
  int days = 500;
  std::uint64_t seed = 0;
  std::string market = "SYNTH";
  Date start = {2019, 4, 1};
  double start_price = 1000.0;
  double drift = 0.0;          // per-day mean log return
  double volatility = 0.01;    // per-day log-return standard deviation
  double trend_slope = 0.0005; // TrendWithNoise: per-day log-price slope
  double strength = 1.0;       // SeparableRegime: probability the planted rule decides
};

struct SynthResult {
  OhlcSeries series;
  // SeparableRegime: planted next-open direction for days 0..days-2
  // (1 = open(t+1) > open(t)). Empty for other kinds.
  std::vector<std::uint8_t> planted;
};

// Trading days only (weekends skipped) starting at spec.start. Bars satisfy
// the OHLC invariants by construction.
SynthResult generate_with_record(const GenSpec& spec);
OhlcSeries generate(const GenSpec& spec);

}  // namespace opentrend
