#include "opentrend/learners/standardizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace opentrend {

Standardizer Standardizer::fit(const MatrixView& x) {
  if (x.rows == 0) throw std::invalid_argument("Standardizer::fit on empty matrix");
  Standardizer s;
  s.mean_.assign(x.cols, 0.0);
  s.scale_.assign(x.cols, 1.0);
  const auto n = static_cast<double>(x.rows);
  for (std::size_t j = 0; j < x.cols; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) sum += x(i, j);
    const double mean = sum / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) ss += (x(i, j) - mean) * (x(i, j) - mean);
    const double sd = std::sqrt(ss / n);
    s.mean_[j] = mean;
    // Rounding in the mean leaves a tiny residual spread on constant columns.
    s.scale_[j] = sd > 1e-12 * std::max(1.0, std::abs(mean)) ? sd : 1.0;
  }
  return s;
}

void Standardizer::apply(std::span<const double> in, std::span<double> out) const {
  for (std::size_t j = 0; j < mean_.size(); ++j) out[j] = (in[j] - mean_[j]) / scale_[j];
}

std::vector<double> Standardizer::transform(const MatrixView& x) const {
  if (x.cols != mean_.size()) throw std::invalid_argument("Standardizer: column count mismatch");
  std::vector<double> out(x.rows * x.cols);
  for (std::size_t i = 0; i < x.rows; ++i) {
    apply(x.row(i), std::span<double>(out).subspan(i * x.cols, x.cols));
  }
  return out;
}

nlohmann::json Standardizer::to_json() const { return {{"mean", mean_}, {"scale", scale_}}; }

Standardizer Standardizer::from_json(const nlohmann::json& j) {
  Standardizer s;
  s.mean_ = j.at("mean").get<std::vector<double>>();
  s.scale_ = j.at("scale").get<std::vector<double>>();
  if (s.mean_.size() != s.scale_.size()) throw std::invalid_argument("standardizer shape mismatch");
  return s;
}

}  // namespace opentrend
