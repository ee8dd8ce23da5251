#include "opentrend/learners/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace opentrend {
namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct NodeStats {
  double g = 0.0;
  double h = 0.0;
};

struct BestSplit {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
};

struct ScanState {
  double g = 0.0;
  double h = 0.0;
  double last = 0.0;
  bool seen = false;
};

}  // namespace

GradientBoostedTrees GradientBoostedTrees::fit(const MatrixView& x, std::span<const Label> y,
                                               const BoostingParams& params) {
  const std::size_t n = x.rows;
  const std::size_t d = x.cols;
  if (n == 0 || y.size() != n) throw std::invalid_argument("boosting: bad training shape");

  double positives = 0.0;
  for (Label v : y) positives += v;
  const double prior = std::clamp(positives / static_cast<double>(n), 1e-12, 1.0 - 1e-12);
  const double base = std::log(prior / (1.0 - prior));

  std::vector<std::vector<std::size_t>> order(d, std::vector<std::size_t>(n));
  for (std::size_t f = 0; f < d; ++f) {
    std::iota(order[f].begin(), order[f].end(), std::size_t{0});
    std::stable_sort(order[f].begin(), order[f].end(),
                     [&](std::size_t a, std::size_t b) { return x(a, f) < x(b, f); });
  }

  std::vector<double> margin(n, base);
  std::vector<double> grad(n), hess(n);
  std::vector<int> node_of(n);
  std::vector<Tree> trees;
  trees.reserve(static_cast<std::size_t>(params.iterations));

  for (int iter = 0; iter < params.iterations; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(margin[i]);
      grad[i] = p - y[i];
      hess[i] = p * (1.0 - p);
    }
    Tree tree;
    tree.nodes.emplace_back();
    std::vector<NodeStats> stats(1);
    std::fill(node_of.begin(), node_of.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      stats[0].g += grad[i];
      stats[0].h += hess[i];
    }
    std::vector<int> level = {0};

    for (int depth = 0; depth < params.max_depth && !level.empty(); ++depth) {
      const std::size_t node_count = tree.nodes.size();
      std::vector<char> active(node_count, 0);
      for (int k : level) active[static_cast<std::size_t>(k)] = 1;
      std::vector<BestSplit> best(node_count);
      std::vector<ScanState> scan(node_count);

      for (std::size_t f = 0; f < d; ++f) {
        for (int k : level) scan[static_cast<std::size_t>(k)] = ScanState{};
        for (std::size_t s : order[f]) {
          const auto k = static_cast<std::size_t>(node_of[s]);
          if (!active[k]) continue;
          ScanState& st = scan[k];
          const double v = x(s, f);
          if (st.seen && v > st.last) {
            const double gl = st.g, hl = st.h;
            const double gr = stats[k].g - gl, hr = stats[k].h - hl;
            if (hl >= params.min_child_weight && hr >= params.min_child_weight) {
              const double gain = 0.5 * (gl * gl / (hl + params.lambda) +
                                         gr * gr / (hr + params.lambda) -
                                         stats[k].g * stats[k].g / (stats[k].h + params.lambda));
              if (gain > best[k].gain) best[k] = {gain, static_cast<int>(f), st.last};
            }
          }
          st.g += grad[s];
          st.h += hess[s];
          st.last = v;
          st.seen = true;
        }
      }

      std::vector<int> next;
      for (int k : level) {
        const BestSplit& b = best[static_cast<std::size_t>(k)];
        if (b.feature < 0) continue;
        const int left = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        stats.resize(tree.nodes.size());
        TreeNode& node = tree.nodes[static_cast<std::size_t>(k)];
        node.feature = b.feature;
        node.threshold = b.threshold;
        node.left = left;
        node.right = left + 1;
        next.push_back(left);
        next.push_back(left + 1);
      }
      for (std::size_t i = 0; i < n; ++i) {
        const TreeNode& node = tree.nodes[static_cast<std::size_t>(node_of[i])];
        if (node.is_leaf() || !active[static_cast<std::size_t>(node_of[i])]) continue;
        node_of[i] = x(i, static_cast<std::size_t>(node.feature)) <= node.threshold ? node.left
                                                                                    : node.right;
        stats[static_cast<std::size_t>(node_of[i])].g += grad[i];
        stats[static_cast<std::size_t>(node_of[i])].h += hess[i];
      }
      level = std::move(next);
    }

    for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
      if (tree.nodes[k].is_leaf()) {
        tree.nodes[k].value =
            -params.learning_rate * stats[k].g / (stats[k].h + params.lambda);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      margin[i] += tree.nodes[static_cast<std::size_t>(node_of[i])].value;
    }
    trees.push_back(std::move(tree));
  }
  return GradientBoostedTrees(base, std::move(trees));
}

double GradientBoostedTrees::margin(std::span<const double> x) const {
  double m = base_margin_;
  for (const Tree& t : trees_) m += t.evaluate(x);
  return m;
}

double GradientBoostedTrees::score(std::span<const double> x) const { return sigmoid(margin(x)); }

nlohmann::json GradientBoostedTrees::save() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const Tree& t : trees_) arr.push_back(t.to_json());
  return {{"base_margin", base_margin_}, {"trees", std::move(arr)}};
}

GradientBoostedTrees GradientBoostedTrees::load(const nlohmann::json& j) {
  std::vector<Tree> trees;
  for (const auto& t : j.at("trees")) trees.push_back(Tree::from_json(t));
  return GradientBoostedTrees(j.at("base_margin").get<double>(), std::move(trees));
}

}  // namespace opentrend
