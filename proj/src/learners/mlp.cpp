#include "opentrend/learners/mlp.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace opentrend {
namespace {

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Eigen::MatrixXd gather_columns(const MatrixView& x, std::span<const std::size_t> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(x.cols), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t b = 0; b < rows.size(); ++b) {
    const auto r = x.row(rows[b]);
    for (std::size_t j = 0; j < x.cols; ++j) {
      out(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(b)) = r[j];
    }
  }
  return out;
}

}  // namespace

std::vector<int> parse_layer_widths(const std::string& text) {
  std::vector<int> widths;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    widths.push_back(std::stoi(text.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return widths;
}

Mlp::Mlp(std::vector<Eigen::MatrixXd> weights, std::vector<Eigen::VectorXd> biases, int epochs)
    : weights_(std::move(weights)), biases_(std::move(biases)), epochs_(epochs) {
  if (weights_.empty() || weights_.size() != biases_.size()) {
    throw std::invalid_argument("mlp: inconsistent layers");
  }
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    if (weights_[l].rows() != biases_[l].size() ||
        (l > 0 && weights_[l].cols() != weights_[l - 1].rows())) {
      throw std::invalid_argument("mlp: layer shapes do not chain");
    }
  }
  if (weights_.back().rows() != 1) throw std::invalid_argument("mlp: output layer must have 1 unit");
}

Mlp Mlp::initialize(std::size_t inputs, std::span<const int> hidden, Rng& rng) {
  std::vector<Eigen::Index> sizes = {static_cast<Eigen::Index>(inputs)};
  for (int h : hidden) sizes.push_back(h);
  sizes.push_back(1);
  std::vector<Eigen::MatrixXd> w;
  std::vector<Eigen::VectorXd> b;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const Eigen::Index fan_in = sizes[l];
    const Eigen::Index fan_out = sizes[l + 1];
    const double factor = l + 2 == sizes.size() ? 2.0 : 6.0;
    const double bound = std::sqrt(factor / static_cast<double>(fan_in + fan_out));
    Eigen::MatrixXd wl(fan_out, fan_in);
    for (Eigen::Index c = 0; c < fan_in; ++c) {
      for (Eigen::Index r = 0; r < fan_out; ++r) wl(r, c) = bound * (2.0 * rng.uniform() - 1.0);
    }
    Eigen::VectorXd bl(fan_out);
    for (Eigen::Index r = 0; r < fan_out; ++r) bl[r] = bound * (2.0 * rng.uniform() - 1.0);
    w.push_back(std::move(wl));
    b.push_back(std::move(bl));
  }
  return Mlp(std::move(w), std::move(b));
}

double Mlp::batch_loss_and_gradient(const Eigen::MatrixXd& input, const Eigen::VectorXd& target,
                                    double alpha, std::vector<Eigen::MatrixXd>* grad_w,
                                    std::vector<Eigen::VectorXd>* grad_b) const {
  const std::size_t layers = weights_.size();
  const auto batch = static_cast<double>(input.cols());
  std::vector<Eigen::MatrixXd> act(layers + 1);
  act[0] = input;
  for (std::size_t l = 0; l < layers; ++l) {
    act[l + 1] = (weights_[l] * act[l]).colwise() + biases_[l];
    if (l + 1 < layers) act[l + 1] = act[l + 1].cwiseMax(0.0);
  }
  const Eigen::MatrixXd& z = act[layers];  // 1 x batch, pre-sigmoid
  double loss = 0.0;
  for (Eigen::Index i = 0; i < z.cols(); ++i) loss += softplus(z(0, i)) - target[i] * z(0, i);
  loss /= batch;
  double penalty = 0.0;
  for (const auto& w : weights_) penalty += w.squaredNorm();
  loss += 0.5 * alpha * penalty / batch;

  if (grad_w == nullptr) return loss;
  grad_w->resize(layers);
  grad_b->resize(layers);
  Eigen::MatrixXd delta(1, z.cols());
  for (Eigen::Index i = 0; i < z.cols(); ++i) delta(0, i) = (sigmoid(z(0, i)) - target[i]) / batch;
  for (std::size_t l = layers; l-- > 0;) {
    (*grad_w)[l] = delta * act[l].transpose() + (alpha / batch) * weights_[l];
    (*grad_b)[l] = delta.rowwise().sum();
    if (l == 0) break;
    Eigen::MatrixXd back = weights_[l].transpose() * delta;
    // ReLU derivative: pass where the activation was positive.
    delta = back.cwiseProduct((act[l].array() > 0.0).cast<double>().matrix());
  }
  return loss;
}

double Mlp::loss_and_gradient(const MatrixView& x, std::span<const Label> y, double alpha,
                              std::vector<double>* grad) const {
  std::vector<std::size_t> rows(x.rows);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  const Eigen::MatrixXd input = gather_columns(x, rows);
  Eigen::VectorXd target(static_cast<Eigen::Index>(x.rows));
  for (std::size_t i = 0; i < x.rows; ++i) target[static_cast<Eigen::Index>(i)] = y[i];
  if (grad == nullptr) return batch_loss_and_gradient(input, target, alpha, nullptr, nullptr);
  std::vector<Eigen::MatrixXd> gw;
  std::vector<Eigen::VectorXd> gb;
  const double loss = batch_loss_and_gradient(input, target, alpha, &gw, &gb);
  grad->clear();
  for (std::size_t l = 0; l < gw.size(); ++l) {
    grad->insert(grad->end(), gw[l].data(), gw[l].data() + gw[l].size());
    grad->insert(grad->end(), gb[l].data(), gb[l].data() + gb[l].size());
  }
  return loss;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    n += static_cast<std::size_t>(weights_[l].size() + biases_[l].size());
  }
  return n;
}

std::vector<double> Mlp::flatten() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    out.insert(out.end(), weights_[l].data(), weights_[l].data() + weights_[l].size());
    out.insert(out.end(), biases_[l].data(), biases_[l].data() + biases_[l].size());
  }
  return out;
}

void Mlp::assign(std::span<const double> params) {
  if (params.size() != parameter_count()) throw std::invalid_argument("mlp: parameter count");
  std::size_t k = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    for (Eigen::Index i = 0; i < weights_[l].size(); ++i) weights_[l].data()[i] = params[k++];
    for (Eigen::Index i = 0; i < biases_[l].size(); ++i) biases_[l].data()[i] = params[k++];
  }
}

Mlp Mlp::fit(const MatrixView& x, std::span<const Label> y, const MlpParams& params) {
  if (x.rows == 0 || y.size() != x.rows) throw std::invalid_argument("mlp: bad training shape");
  Rng rng(params.seed);
  Mlp net = initialize(x.cols, params.hidden, rng);
  const std::size_t layers = net.weights_.size();
  std::vector<Eigen::MatrixXd> vel_w(layers);
  std::vector<Eigen::VectorXd> vel_b(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    vel_w[l] = Eigen::MatrixXd::Zero(net.weights_[l].rows(), net.weights_[l].cols());
    vel_b[l] = Eigen::VectorXd::Zero(net.biases_[l].size());
  }

  std::vector<std::size_t> order(x.rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto batch_size = static_cast<std::size_t>(params.batch_size);
  double best_loss = std::numeric_limits<double>::infinity();
  int stale = 0;
  std::vector<Eigen::MatrixXd> gw;
  std::vector<Eigen::VectorXd> gb;

  for (int epoch = 1; epoch <= params.max_epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t count = std::min(batch_size, order.size() - start);
      const std::span<const std::size_t> rows(order.data() + start, count);
      const Eigen::MatrixXd input = gather_columns(x, rows);
      Eigen::VectorXd target(static_cast<Eigen::Index>(count));
      for (std::size_t b = 0; b < count; ++b) target[static_cast<Eigen::Index>(b)] = y[rows[b]];
      const double loss = net.batch_loss_and_gradient(input, target, params.alpha, &gw, &gb);
      if (!std::isfinite(loss)) {
        throw FitError("mlp diverged (non-finite loss) at epoch " + std::to_string(epoch));
      }
      epoch_loss += loss * static_cast<double>(count);
      for (std::size_t l = 0; l < layers; ++l) {
        vel_w[l] = params.momentum * vel_w[l] - params.learning_rate * gw[l];
        vel_b[l] = params.momentum * vel_b[l] - params.learning_rate * gb[l];
        net.weights_[l] += vel_w[l];
        net.biases_[l] += vel_b[l];
      }
    }
    epoch_loss /= static_cast<double>(x.rows);
    net.epochs_ = epoch;
    if (epoch_loss > best_loss - params.tol) {
      ++stale;
    } else {
      stale = 0;
    }
    best_loss = std::min(best_loss, epoch_loss);
    if (stale > params.n_iter_no_change) break;
  }
  return net;
}

double Mlp::score(std::span<const double> x) const {
  Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::VectorXd z = weights_[l] * a + biases_[l];
    a = l + 1 < weights_.size() ? Eigen::VectorXd(z.cwiseMax(0.0)) : z;
  }
  return sigmoid(a[0]);
}

nlohmann::json Mlp::save() const {
  nlohmann::json layers = nlohmann::json::array();
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    layers.push_back({{"rows", weights_[l].rows()},
                      {"cols", weights_[l].cols()},
                      {"weights", std::vector<double>(weights_[l].data(),
                                                      weights_[l].data() + weights_[l].size())},
                      {"bias", std::vector<double>(biases_[l].data(),
                                                   biases_[l].data() + biases_[l].size())}});
  }
  return {{"layers", std::move(layers)}, {"epochs", epochs_}};
}

Mlp Mlp::load(const nlohmann::json& j) {
  std::vector<Eigen::MatrixXd> w;
  std::vector<Eigen::VectorXd> b;
  for (const auto& layer : j.at("layers")) {
    const auto rows = layer.at("rows").get<Eigen::Index>();
    const auto cols = layer.at("cols").get<Eigen::Index>();
    const auto wv = layer.at("weights").get<std::vector<double>>();
    const auto bv = layer.at("bias").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(wv.size()) != rows * cols ||
        static_cast<Eigen::Index>(bv.size()) != rows) {
      throw std::invalid_argument("mlp: layer payload size mismatch");
    }
    w.push_back(Eigen::Map<const Eigen::MatrixXd>(wv.data(), rows, cols));
    b.push_back(Eigen::Map<const Eigen::VectorXd>(bv.data(), rows));
  }
  return Mlp(std::move(w), std::move(b), j.value("epochs", 0));
}

}  // namespace opentrend
