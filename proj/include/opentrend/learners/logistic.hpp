#pragma once

#include <vector>

#include "opentrend/learners/classifier.hpp"

namespace opentrend {

// L2-regularized logistic loss over parameters theta = [w_0..w_{d-1}, b]:
//   0.5 * |w|^2 + C * sum_i [log(1 + exp(z_i)) - y_i z_i],  z_i = w.x_i + b.
// The intercept is not penalized. Writes the gradient into `grad` (size d+1)
// when non-empty and returns the objective.
double logistic_objective(std::span<const double> theta, const MatrixView& x,
                          std::span<const Label> y, double c, std::span<double> grad = {});

struct LogisticParams {
  double c = 1.0;
  double tol = 1e-6;
  int max_iter = 1000;
};

// Minimizes logistic_objective with damped Newton steps until the gradient
// norm drops below tol. Throws FitError (with the iteration count) if the
// objective becomes non-finite or max_iter is exhausted.
class LogisticRegression final : public Classifier {
 public:
  LogisticRegression(std::vector<double> weights, double bias, int iterations = 0,
                     double gradient_norm = 0.0)
      : weights_(std::move(weights)),
        bias_(bias),
        iterations_(iterations),
        gradient_norm_(gradient_norm) {}

  static LogisticRegression fit(const MatrixView& x, std::span<const Label> y,
                                const LogisticParams& params);

  double decision(std::span<const double> x) const;
  double score(std::span<const double> x) const override;
  nlohmann::json save() const override;
  static LogisticRegression load(const nlohmann::json& j);

  const std::vector<double>& weights() const { return weights_; }
  double bias() const { return bias_; }
  int iterations() const { return iterations_; }
  double gradient_norm() const { return gradient_norm_; }

 private:
  std::vector<double> weights_;
  double bias_;
  int iterations_;
  double gradient_norm_;
};

}  // namespace opentrend
