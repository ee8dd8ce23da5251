#include "opentrend/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "opentrend/random.hpp"

namespace opentrend {
namespace {

void validate(const GenSpec& spec) {
  if (spec.days < 21) throw std::invalid_argument("synth: days must be >= 21");
  if (!(spec.volatility >= 0.0) || !std::isfinite(spec.volatility)) {
    throw std::invalid_argument("synth: volatility must be finite and >= 0");
  }
  if (!(spec.start_price > 0.0) || !std::isfinite(spec.start_price)) {
    throw std::invalid_argument("synth: start_price must be positive");
  }
  if (!(spec.strength >= 0.0 && spec.strength <= 1.0)) {
    throw std::invalid_argument("synth: strength must be in [0, 1]");
  }
  if (!std::isfinite(spec.drift) || !std::isfinite(spec.trend_slope)) {
    throw std::invalid_argument("synth: drift and trend_slope must be finite");
  }
}

std::vector<Date> trading_days(Date start, int count) {
  std::vector<Date> out;
  out.reserve(static_cast<std::size_t>(count));
  std::int64_t day = start.to_days();
  while (static_cast<int>(out.size()) < count) {
    const Date d = Date::from_days(day++);
    if (d.weekday() < 5) out.push_back(d);
  }
  return out;
}

// High/low wrap the open-close body with a non-negative excursion.
OhlcBar make_bar(Date date, double open, double close, double up, double down) {
  return OhlcBar{date, open, std::max(open, close) * std::exp(up), std::min(open, close) * std::exp(-down),
                 close};
}

}  // namespace

std::string_view gen_kind_name(GenKind kind) {
  switch (kind) {
    case GenKind::GeometricRandomWalk: return "random_walk";
    case GenKind::TrendWithNoise: return "trend";
    case GenKind::ConstantMarket: return "constant";
    case GenKind::SeparableRegime: return "separable";
  }
  return "?";
}

GenKind parse_gen_kind(std::string_view name) {
  for (GenKind k : {GenKind::GeometricRandomWalk, GenKind::TrendWithNoise, GenKind::ConstantMarket,
                    GenKind::SeparableRegime}) {
    if (gen_kind_name(k) == name) return k;
  }
  throw std::invalid_argument("unknown generator kind '" + std::string(name) + "'");
}

SynthResult generate_with_record(const GenSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  const std::vector<Date> dates = trading_days(spec.start, spec.days);
  const auto n = static_cast<std::size_t>(spec.days);
  const double vol = spec.volatility;
  std::vector<OhlcBar> bars;
  bars.reserve(n);
  SynthResult result;

  switch (spec.kind) {
    case GenKind::ConstantMarket:
      for (const Date& d : dates) {
        bars.push_back({d, spec.start_price, spec.start_price, spec.start_price, spec.start_price});
      }
      break;

    case GenKind::GeometricRandomWalk: {
      // Closes follow exact N(drift, vol^2) log returns; the open gaps from the
      // previous close and the intraday excursions do not touch that path.
      double prev_close = spec.start_price;
      for (std::size_t t = 0; t < n; ++t) {
        const double close = prev_close * std::exp(spec.drift + vol * rng.normal());
        const double open = prev_close * std::exp(0.25 * vol * rng.normal());
        const double up = 0.5 * vol * std::abs(rng.normal());
        const double down = 0.5 * vol * std::abs(rng.normal());
        bars.push_back(make_bar(dates[t], open, close, up, down));
        prev_close = close;
      }
      break;
    }

    case GenKind::TrendWithNoise: {
      const double log_start = std::log(spec.start_price);
      for (std::size_t t = 0; t < n; ++t) {
        const double level = log_start + spec.trend_slope * static_cast<double>(t);
        const double open = std::exp(level + vol * rng.normal());
        const double close = std::exp(level + vol * rng.normal());
        const double up = 0.5 * vol * std::abs(rng.normal());
        const double down = 0.5 * vol * std::abs(rng.normal());
        bars.push_back(make_bar(dates[t], open, close, up, down));
      }
      break;
    }

    case GenKind::SeparableRegime: {
      // Day t's body direction sign(r_cl) decides whether the next open gaps
      // up or down, with probability `strength`; otherwise a fair coin does.
      const double scale = vol > 0 ? vol : 0.01;
      double open = spec.start_price;
      result.planted.reserve(n - 1);
      for (std::size_t t = 0; t < n; ++t) {
        const bool body_up = rng.coin(0.5);
        const double body = scale * (0.2 + std::abs(rng.normal()));
        const double r_cl = body_up ? body : -body;
        const double close = open * std::exp(r_cl);
        const double up = 0.5 * scale * std::abs(rng.normal());
        const double down = 0.5 * scale * std::abs(rng.normal());
        bars.push_back(make_bar(dates[t], open, close, up, down));
        if (t + 1 == n) break;
        const bool follow = rng.uniform() < spec.strength;
        const bool gap_up = follow ? body_up : rng.coin(0.5);
        const double gap = scale * (0.1 + 0.5 * std::abs(rng.normal()));
        open *= std::exp(gap_up ? gap : -gap);
        result.planted.push_back(gap_up ? 1 : 0);
      }
      break;
    }
  }
  result.series = OhlcSeries(spec.market, std::move(bars));
  return result;
}

OhlcSeries generate(const GenSpec& spec) { return generate_with_record(spec).series; }

}  // namespace opentrend
