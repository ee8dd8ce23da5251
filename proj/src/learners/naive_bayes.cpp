#include "opentrend/learners/naive_bayes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace opentrend {

GaussianNaiveBayes GaussianNaiveBayes::fit(const MatrixView& x, std::span<const Label> y,
                                           double var_smoothing) {
  const std::size_t n = x.rows;
  const std::size_t d = x.cols;
  if (n == 0 || y.size() != n) throw std::invalid_argument("naive bayes: bad training shape");

  double max_var = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += x(i, j);
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss += (x(i, j) - mean) * (x(i, j) - mean);
    max_var = std::max(max_var, ss / static_cast<double>(n));
  }
  const double epsilon = var_smoothing * max_var;

  std::array<ClassModel, 2> classes;
  for (int c = 0; c < 2; ++c) {
    ClassModel& m = classes[static_cast<std::size_t>(c)];
    m.mean.assign(d, 0.0);
    m.var.assign(d, 0.0);
    double count = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (y[i] != c) continue;
      count += 1.0;
      for (std::size_t j = 0; j < d; ++j) m.mean[j] += x(i, j);
    }
    if (count == 0.0) {
      m.log_prior = -std::numeric_limits<double>::infinity();
      std::fill(m.var.begin(), m.var.end(), 1.0);
      continue;
    }
    for (double& v : m.mean) v /= count;
    for (std::size_t i = 0; i < n; ++i) {
      if (y[i] != c) continue;
      for (std::size_t j = 0; j < d; ++j) m.var[j] += (x(i, j) - m.mean[j]) * (x(i, j) - m.mean[j]);
    }
    for (double& v : m.var) {
      v = v / count + epsilon;
      // All-constant training data leaves epsilon at zero.
      if (v <= 0.0) v = std::numeric_limits<double>::min();
    }
    m.log_prior = std::log(count / static_cast<double>(n));
  }
  return GaussianNaiveBayes(std::move(classes));
}

double GaussianNaiveBayes::joint_log_likelihood(std::span<const double> x, int c) const {
  const ClassModel& m = classes_[static_cast<std::size_t>(c)];
  double ll = m.log_prior;
  for (std::size_t j = 0; j < m.mean.size(); ++j) {
    const double diff = x[j] - m.mean[j];
    ll -= 0.5 * std::log(2.0 * std::numbers::pi * m.var[j]) + 0.5 * diff * diff / m.var[j];
  }
  return ll;
}

double GaussianNaiveBayes::score(std::span<const double> x) const {
  const double l0 = joint_log_likelihood(x, 0);
  const double l1 = joint_log_likelihood(x, 1);
  if (std::isinf(l0) && l0 < 0) return 1.0;
  if (std::isinf(l1) && l1 < 0) return 0.0;
  const double delta = l0 - l1;
  if (delta >= 0) {
    const double e = std::exp(-delta);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(delta));
}

nlohmann::json GaussianNaiveBayes::save() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& m : classes_) {
    arr.push_back({{"log_prior", std::isfinite(m.log_prior) ? nlohmann::json(m.log_prior)
                                                            : nlohmann::json(nullptr)},
                   {"mean", m.mean},
                   {"var", m.var}});
  }
  return {{"classes", std::move(arr)}};
}

GaussianNaiveBayes GaussianNaiveBayes::load(const nlohmann::json& j) {
  const auto& arr = j.at("classes");
  if (arr.size() != 2) throw std::invalid_argument("naive bayes: expected two classes");
  std::array<ClassModel, 2> classes;
  for (std::size_t c = 0; c < 2; ++c) {
    const auto& lp = arr[c].at("log_prior");
    classes[c].log_prior =
        lp.is_null() ? -std::numeric_limits<double>::infinity() : lp.get<double>();
    classes[c].mean = arr[c].at("mean").get<std::vector<double>>();
    classes[c].var = arr[c].at("var").get<std::vector<double>>();
  }
  return GaussianNaiveBayes(std::move(classes));
}

}  // namespace opentrend
