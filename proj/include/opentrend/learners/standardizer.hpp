#pragma once

#include <span>
#include <vector>

#include "json.hpp"
#include "opentrend/features.hpp"

namespace opentrend {

// Per-column z-score fitted on training rows only. Population standard
// deviation; near-constant columns get scale 1.
class Standardizer {
 public:
  Standardizer() = default;

  static Standardizer fit(const MatrixView& x);

  bool empty() const { return mean_.empty(); }
  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& scale() const { return scale_; }

  void apply(std::span<const double> in, std::span<double> out) const;
  std::vector<double> transform(const MatrixView& x) const;

  nlohmann::json to_json() const;
  static Standardizer from_json(const nlohmann::json& j);

 private:
  std::vector<double> mean_;
  std::vector<double> scale_;
};

}  // namespace opentrend
