#pragma once

#include <Eigen/Dense>
#include <vector>

#include "opentrend/learners/classifier.hpp"
#include "opentrend/random.hpp"

namespace opentrend {

struct MlpParams {
  std::vector<int> hidden = {128, 64, 32, 32, 16, 16, 8, 8};
  double learning_rate = 1e-3;
  double momentum = 0.9;
  int batch_size = 32;
  int max_epochs = 1000;
  double tol = 1e-4;
  int n_iter_no_change = 10;
  double alpha = 1e-4;  // L2 penalty on weights (not biases)
  std::uint64_t seed = 0;
};

// ReLU hidden layers feeding one sigmoid output unit, trained on the logistic
// loss with mini-batch gradient descent plus momentum. Training stops early
// once the epoch loss fails to improve by `tol` for more than
// `n_iter_no_change` consecutive epochs.
class Mlp final : public Classifier {
 public:
  Mlp(std::vector<Eigen::MatrixXd> weights, std::vector<Eigen::VectorXd> biases, int epochs = 0);

  // Glorot-uniform initialization (bound sqrt(6/(in+out)) for hidden layers,
  // sqrt(2/(in+out)) for the sigmoid output), biases drawn the same way.
  static Mlp initialize(std::size_t inputs, std::span<const int> hidden, Rng& rng);
  static Mlp fit(const MatrixView& x, std::span<const Label> y, const MlpParams& params);

  // Mean logistic loss over the rows plus alpha / (2 * rows) * sum of squared
  // weights. Fills `grad` (layout of flatten()) when non-null.
  double loss_and_gradient(const MatrixView& x, std::span<const Label> y, double alpha,
                           std::vector<double>* grad) const;

  std::size_t parameter_count() const;
  // Per layer: weights (column-major) then biases.
  std::vector<double> flatten() const;
  void assign(std::span<const double> params);

  double score(std::span<const double> x) const override;
  nlohmann::json save() const override;
  static Mlp load(const nlohmann::json& j);

  int epochs_run() const { return epochs_; }
  std::size_t layer_count() const { return weights_.size(); }

 private:
  double batch_loss_and_gradient(const Eigen::MatrixXd& input, const Eigen::VectorXd& target,
                                 double alpha, std::vector<Eigen::MatrixXd>* grad_w,
                                 std::vector<Eigen::VectorXd>* grad_b) const;

  std::vector<Eigen::MatrixXd> weights_;  // out x in
  std::vector<Eigen::VectorXd> biases_;
  int epochs_ = 0;
};

std::vector<int> parse_layer_widths(const std::string& text);

}  // namespace opentrend
