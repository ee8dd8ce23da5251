#include "opentrend/learners/logistic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace opentrend {
namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double linear(std::span<const double> theta, std::span<const double> row) {
  const std::size_t d = row.size();
  double z = theta[d];
  for (std::size_t j = 0; j < d; ++j) z += theta[j] * row[j];
  return z;
}

}  // namespace

double logistic_objective(std::span<const double> theta, const MatrixView& x,
                          std::span<const Label> y, double c, std::span<double> grad) {
  const std::size_t d = x.cols;
  if (theta.size() != d + 1) throw std::invalid_argument("logistic_objective: bad theta size");
  double loss = 0.0;
  for (std::size_t j = 0; j < d; ++j) loss += 0.5 * theta[j] * theta[j];
  if (!grad.empty()) {
    for (std::size_t j = 0; j < d; ++j) grad[j] = theta[j];
    grad[d] = 0.0;
  }
  for (std::size_t i = 0; i < x.rows; ++i) {
    const auto row = x.row(i);
    const double z = linear(theta, row);
    loss += c * (softplus(z) - y[i] * z);
    if (!grad.empty()) {
      const double r = c * (sigmoid(z) - y[i]);
      for (std::size_t j = 0; j < d; ++j) grad[j] += r * row[j];
      grad[d] += r;
    }
  }
  return loss;
}

LogisticRegression LogisticRegression::fit(const MatrixView& x, std::span<const Label> y,
                                           const LogisticParams& params) {
  const std::size_t d = x.cols;
  const std::size_t n = x.rows;
  if (n == 0 || y.size() != n) throw std::invalid_argument("logistic: bad training shape");
  const auto dim = static_cast<Eigen::Index>(d + 1);

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd grad(dim);
  double loss = logistic_objective({theta.data(), d + 1}, x, y, params.c, {grad.data(), d + 1});

  for (int iter = 1; iter <= params.max_iter; ++iter) {
    if (!std::isfinite(loss)) {
      throw FitError("logistic regression diverged at iteration " + std::to_string(iter));
    }
    const double gnorm = grad.norm();
    if (gnorm < params.tol) {
      return LogisticRegression(std::vector<double>(theta.data(), theta.data() + d), theta[dim - 1],
                                iter - 1, gnorm);
    }

    Eigen::MatrixXd hessian = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index j = 0; j + 1 < dim; ++j) hessian(j, j) = 1.0;
    Eigen::VectorXd xi(dim);
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = x.row(i);
      for (std::size_t j = 0; j < d; ++j) xi[static_cast<Eigen::Index>(j)] = row[j];
      xi[dim - 1] = 1.0;
      const double p = sigmoid(theta.dot(xi));
      hessian.selfadjointView<Eigen::Lower>().rankUpdate(xi, params.c * p * (1.0 - p));
    }
    hessian = hessian.selfadjointView<Eigen::Lower>();
    // A tiny ridge keeps the intercept direction invertible on separable data.
    hessian(dim - 1, dim - 1) += 1e-12;
    const Eigen::VectorXd step = hessian.ldlt().solve(-grad);

    // Backtracking line search on the Armijo condition.
    double t = 1.0;
    const double slope = grad.dot(step);
    Eigen::VectorXd candidate(dim);
    Eigen::VectorXd cand_grad(dim);
    double cand_loss = loss;
    // Once the predicted decrease is below the resolution of the loss the
    // Armijo test is meaningless; take the full Newton step.
    const bool local = -slope <= 1e-10 * std::max(1.0, std::abs(loss));
    for (int k = 0; k < 60; ++k) {
      candidate = theta + t * step;
      cand_loss = logistic_objective({candidate.data(), d + 1}, x, y, params.c,
                                     {cand_grad.data(), d + 1});
      if (std::isfinite(cand_loss) && (local || cand_loss <= loss + 1e-4 * t * slope)) break;
      t *= 0.5;
    }
    if (!local && !(cand_loss <= loss)) {
      // No descent possible at this precision: accept only if already tight.
      if (gnorm < 1e3 * params.tol) {
        return LogisticRegression(std::vector<double>(theta.data(), theta.data() + d),
                                  theta[dim - 1], iter, gnorm);
      }
      throw FitError("logistic regression line search failed at iteration " +
                     std::to_string(iter));
    }
    theta = candidate;
    grad = cand_grad;
    loss = cand_loss;
  }
  throw FitError("logistic regression did not converge in " + std::to_string(params.max_iter) +
                 " iterations (gradient norm " + std::to_string(grad.norm()) + ")");
}

double LogisticRegression::decision(std::span<const double> x) const {
  double z = bias_;
  for (std::size_t j = 0; j < weights_.size(); ++j) z += weights_[j] * x[j];
  return z;
}

double LogisticRegression::score(std::span<const double> x) const { return sigmoid(decision(x)); }

nlohmann::json LogisticRegression::save() const {
  return {{"weights", weights_}, {"bias", bias_}, {"iterations", iterations_},
          {"gradient_norm", gradient_norm_}};
}

LogisticRegression LogisticRegression::load(const nlohmann::json& j) {
  return LogisticRegression(j.at("weights").get<std::vector<double>>(), j.at("bias").get<double>(),
                            j.value("iterations", 0), j.value("gradient_norm", 0.0));
}

}  // namespace opentrend
