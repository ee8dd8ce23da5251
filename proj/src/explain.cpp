#include "opentrend/explain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "opentrend/random.hpp"

namespace opentrend {
namespace {

void check_inputs(std::span<const double> row, const MatrixView& background) {
  if (background.rows == 0) throw std::invalid_argument("shapley: empty background");
  if (background.cols != row.size()) {
    throw std::invalid_argument("shapley: row and background widths differ");
  }
}

ScoreFn bind_model(const TrainedModel& model, const FeatureMatrix& background) {
  if (background.columns() != model.feature_names()) {
    throw std::invalid_argument("shapley: background columns differ from model features");
  }
  return [&model](std::span<const double> x) { return model.score(x); };
}

// |S|! (d - |S| - 1)! / d! for |S| = 0..d-1, built multiplicatively.
std::vector<double> coalition_weights(std::size_t d) {
  std::vector<double> w(d);
  // w(0) = 1/d; w(s+1) = w(s) * (s+1) / (d-s-1).
  w[0] = 1.0 / static_cast<double>(d);
  for (std::size_t s = 0; s + 1 < d; ++s) {
    w[s + 1] = w[s] * static_cast<double>(s + 1) / static_cast<double>(d - s - 1);
  }
  return w;
}

}  // namespace

std::string_view shapley_mode_name(ShapleyMode mode) {
  return mode == ShapleyMode::Exact ? "exact" : "sampled";
}

ShapleyMode parse_shapley_mode(std::string_view name) {
  if (name == "exact") return ShapleyMode::Exact;
  if (name == "sampled") return ShapleyMode::Sampled;
  throw std::invalid_argument("unknown shapley mode '" + std::string(name) + "'");
}

AttributionRow shapley_exact(const ScoreFn& model, std::span<const double> row,
                             const MatrixView& background) {
  check_inputs(row, background);
  const std::size_t d = row.size();
  if (d == 0) throw std::invalid_argument("shapley: no features");
  if (d > kMaxExactFeatures) {
    throw std::invalid_argument("shapley_exact: " + std::to_string(d) +
                                " features exceeds the enumeration limit");
  }
  const std::size_t coalitions = std::size_t{1} << d;
  const auto m = static_cast<double>(background.rows);

  std::vector<double> value(coalitions);
  std::vector<double> hybrid(d);
  for (std::size_t mask = 0; mask < coalitions; ++mask) {
    double sum = 0.0;
    for (std::size_t b = 0; b < background.rows; ++b) {
      const auto bg = background.row(b);
      for (std::size_t j = 0; j < d; ++j) hybrid[j] = (mask >> j) & 1U ? row[j] : bg[j];
      sum += model(hybrid);
    }
    value[mask] = sum / m;
  }

  const std::vector<double> weight = coalition_weights(d);
  AttributionRow out;
  out.phi.assign(d, 0.0);
  for (std::size_t mask = 0; mask < coalitions; ++mask) {
    const auto size = static_cast<std::size_t>(std::popcount(mask));
    if (size == d) continue;
    const double w = weight[size];
    for (std::size_t i = 0; i < d; ++i) {
      if ((mask >> i) & 1U) continue;
      out.phi[i] += w * (value[mask | (std::size_t{1} << i)] - value[mask]);
    }
  }
  out.base_value = value[0];
  out.model_output = model(row);
  return out;
}

AttributionRow shapley_exact(const TrainedModel& model, std::span<const double> row,
                             const FeatureMatrix& background) {
  return shapley_exact(bind_model(model, background), row, background.view());
}

AttributionRow shapley_sampled(const ScoreFn& model, std::span<const double> row,
                               const MatrixView& background, std::size_t n_permutations,
                               std::uint64_t seed) {
  check_inputs(row, background);
  if (n_permutations == 0) throw std::invalid_argument("shapley_sampled: n_permutations must be >= 1");
  const std::size_t d = row.size();
  Rng rng(seed);
  AttributionRow out;
  out.phi.assign(d, 0.0);
  std::vector<std::size_t> order(d);
  std::vector<double> z(d);
  for (std::size_t p = 0; p < n_permutations; ++p) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(order));
    const auto bg = background.row(static_cast<std::size_t>(rng.below(background.rows)));
    std::copy(bg.begin(), bg.end(), z.begin());
    double previous = model(z);
    for (std::size_t feature : order) {
      z[feature] = row[feature];
      const double current = model(z);
      out.phi[feature] += current - previous;
      previous = current;
    }
  }
  for (double& v : out.phi) v /= static_cast<double>(n_permutations);

  double base = 0.0;
  for (std::size_t b = 0; b < background.rows; ++b) base += model(background.row(b));
  out.base_value = base / static_cast<double>(background.rows);
  out.model_output = model(row);
  return out;
}

AttributionRow shapley_sampled(const TrainedModel& model, std::span<const double> row,
                               const FeatureMatrix& background, std::size_t n_permutations,
                               std::uint64_t seed) {
  return shapley_sampled(bind_model(model, background), row, background.view(), n_permutations,
                         seed);
}

ShapleyReport global_importance(const ScoreFn& model, const FeatureMatrix& rows,
                                const FeatureMatrix& background,
                                const GlobalImportanceOptions& options) {
  if (rows.rows() == 0) throw std::invalid_argument("global_importance: no rows");
  if (rows.columns() != background.columns()) {
    throw std::invalid_argument("global_importance: row and background columns differ");
  }
  const std::size_t n = rows.rows();
  std::vector<AttributionRow> attributions(n);
  const auto attribute = [&](std::size_t i) {
    attributions[i] =
        options.mode == ShapleyMode::Exact
            ? shapley_exact(model, rows.row(i), background.view())
            : shapley_sampled(model, rows.row(i), background.view(), options.n_permutations,
                              derive_seed(options.seed, i));
    attributions[i].date = rows.dates()[i];
  };

  const std::size_t workers = std::clamp<std::size_t>(options.threads, 1, n);
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) attribute(i);
  } else {
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < n; i += workers) attribute(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  ShapleyReport report;
  report.feature_names = rows.columns();
  report.global_importance.assign(rows.cols(), 0.0);
  for (const AttributionRow& a : attributions) {
    for (std::size_t j = 0; j < a.phi.size(); ++j) report.global_importance[j] += std::abs(a.phi[j]);
  }
  for (double& v : report.global_importance) v /= static_cast<double>(n);
  report.mode = options.mode;
  report.background_size = background.rows();
  report.rows = n;
  return report;
}

ShapleyReport global_importance(const TrainedModel& model, const FeatureMatrix& rows,
                                const FeatureMatrix& background,
                                const GlobalImportanceOptions& options) {
  if (rows.columns() != model.feature_names()) {
    throw std::invalid_argument("global_importance: columns differ from model features");
  }
  ShapleyReport report = global_importance(bind_model(model, background), rows, background, options);
  report.model = model.spec().name;
  return report;
}

std::vector<std::size_t> sample_rows(std::size_t begin, std::size_t end, std::size_t count,
                                     std::uint64_t seed) {
  if (end < begin) throw std::invalid_argument("sample_rows: bad range");
  const std::size_t n = end - begin;
  std::vector<std::size_t> picked;
  if (count >= n) {
    picked.resize(n);
    std::iota(picked.begin(), picked.end(), begin);
    return picked;
  }
  Rng rng(seed);
  picked = rng.sample_without_replacement(n, count);
  for (auto& p : picked) p += begin;
  std::sort(picked.begin(), picked.end());
  return picked;
}

}  // namespace opentrend
