#include "opentrend/learners/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

namespace opentrend {
namespace {

double impurity(Impurity kind, double n1, double n) {
  if (n <= 0) return 0.0;
  const double p1 = n1 / n;
  const double p0 = 1.0 - p1;
  if (kind == Impurity::Gini) return 1.0 - p1 * p1 - p0 * p0;
  double h = 0.0;
  if (p1 > 0) h -= p1 * std::log2(p1);
  if (p0 > 0) h -= p0 * std::log2(p0);
  return h;
}

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double gain = -std::numeric_limits<double>::infinity();
};

class TreeGrower {
 public:
  TreeGrower(const MatrixView& x, std::span<const Label> y, const ClassTreeParams& params,
             Rng& rng)
      : x_(x), y_(y), params_(params), rng_(rng) {
    max_features_ = params.max_features == 0 ? x.cols : std::min(params.max_features, x.cols);
    samples_.resize(x.rows);
    std::iota(samples_.begin(), samples_.end(), std::size_t{0});
  }

  Tree grow() {
    tree_.nodes.clear();
    tree_.nodes.emplace_back();
    build(0, 0, samples_.size(), 0);
    return std::move(tree_);
  }

 private:
  void build(int node, std::size_t begin, std::size_t end, int depth) {
    const std::size_t n = end - begin;
    std::size_t n1 = 0;
    for (std::size_t i = begin; i < end; ++i) n1 += y_[samples_[i]];
    tree_.nodes[static_cast<std::size_t>(node)].value =
        static_cast<double>(n1) / static_cast<double>(n);

    const bool depth_reached = params_.max_depth >= 0 && depth >= params_.max_depth;
    if (depth_reached || n1 == 0 || n1 == n || n < params_.min_samples_split ||
        n < 2 * params_.min_samples_leaf) {
      return;
    }
    const SplitChoice best = find_split(begin, end, static_cast<double>(n1));
    if (best.feature < 0) return;

    const auto f = static_cast<std::size_t>(best.feature);
    const auto mid_it = std::stable_partition(
        samples_.begin() + static_cast<std::ptrdiff_t>(begin),
        samples_.begin() + static_cast<std::ptrdiff_t>(end),
        [&](std::size_t s) { return x_(s, f) <= best.threshold; });
    const auto mid = static_cast<std::size_t>(mid_it - samples_.begin());

    const int left = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    const int right = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    TreeNode& parent = tree_.nodes[static_cast<std::size_t>(node)];
    parent.feature = best.feature;
    parent.threshold = best.threshold;
    parent.left = left;
    parent.right = right;
    build(left, begin, mid, depth + 1);
    build(right, mid, end, depth + 1);
  }

  // Draws features in random order, skipping columns that are constant on this
  // node, until max_features usable ones are found.
  std::vector<std::size_t> candidate_features(std::size_t begin, std::size_t end) {
    std::vector<std::size_t> order(x_.cols);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<std::size_t> picked;
    for (std::size_t i = 0; i < order.size() && picked.size() < max_features_; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng_.below(order.size() - i));
      std::swap(order[i], order[j]);
      const std::size_t f = order[i];
      double lo = x_(samples_[begin], f);
      double hi = lo;
      for (std::size_t k = begin + 1; k < end; ++k) {
        const double v = x_(samples_[k], f);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (hi > lo) picked.push_back(f);
    }
    std::sort(picked.begin(), picked.end());
    return picked;
  }

  SplitChoice find_split(std::size_t begin, std::size_t end, double n1) {
    const auto n = static_cast<double>(end - begin);
    const double parent = impurity(params_.impurity, n1, n);
    const auto min_leaf = static_cast<double>(params_.min_samples_leaf);
    SplitChoice best;
    for (std::size_t f : candidate_features(begin, end)) {
      if (params_.rule == ThresholdRule::Exhaustive) {
        column_.clear();
        for (std::size_t k = begin; k < end; ++k) {
          column_.emplace_back(x_(samples_[k], f), y_[samples_[k]]);
        }
        std::sort(column_.begin(), column_.end());
        double left_n1 = 0.0;
        for (std::size_t k = 0; k + 1 < column_.size(); ++k) {
          left_n1 += column_[k].second;
          if (!(column_[k].first < column_[k + 1].first)) continue;
          const auto nl = static_cast<double>(k + 1);
          const double nr = n - nl;
          if (nl < min_leaf || nr < min_leaf) continue;
          const double gain = parent - (nl / n) * impurity(params_.impurity, left_n1, nl) -
                              (nr / n) * impurity(params_.impurity, n1 - left_n1, nr);
          if (gain > best.gain) best = {static_cast<int>(f), column_[k].first, gain};
        }
      } else {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t k = begin; k < end; ++k) {
          lo = std::min(lo, x_(samples_[k], f));
          hi = std::max(hi, x_(samples_[k], f));
        }
        double cut = lo + rng_.uniform() * (hi - lo);
        if (!(cut < hi)) cut = lo;
        double nl = 0.0;
        double left_n1 = 0.0;
        for (std::size_t k = begin; k < end; ++k) {
          if (x_(samples_[k], f) <= cut) {
            nl += 1.0;
            left_n1 += y_[samples_[k]];
          }
        }
        const double nr = n - nl;
        if (nl < min_leaf || nr < min_leaf) continue;
        const double gain = parent - (nl / n) * impurity(params_.impurity, left_n1, nl) -
                            (nr / n) * impurity(params_.impurity, n1 - left_n1, nr);
        if (gain > best.gain) best = {static_cast<int>(f), cut, gain};
      }
    }
    return best;
  }

  const MatrixView& x_;
  std::span<const Label> y_;
  const ClassTreeParams& params_;
  Rng& rng_;
  std::size_t max_features_ = 0;
  std::vector<std::size_t> samples_;
  std::vector<std::pair<double, Label>> column_;
  Tree tree_;
};

}  // namespace

int Tree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<int> d(nodes.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].is_leaf()) continue;
    d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
    d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
    deepest = std::max(deepest, d[i] + 1);
  }
  return deepest;
}

std::vector<int> Tree::split_features() const {
  std::set<int> used;
  for (const auto& n : nodes) {
    if (!n.is_leaf()) used.insert(n.feature);
  }
  return {used.begin(), used.end()};
}

nlohmann::json Tree::to_json() const {
  // Columnar layout keeps large forests compact.
  std::vector<int> feature, left, right;
  std::vector<double> threshold, value;
  for (const auto& n : nodes) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    value.push_back(n.value);
  }
  return {{"feature", feature}, {"threshold", threshold}, {"left", left},
          {"right", right},     {"value", value}};
}

Tree Tree::from_json(const nlohmann::json& j) {
  const auto feature = j.at("feature").get<std::vector<int>>();
  const auto threshold = j.at("threshold").get<std::vector<double>>();
  const auto left = j.at("left").get<std::vector<int>>();
  const auto right = j.at("right").get<std::vector<int>>();
  const auto value = j.at("value").get<std::vector<double>>();
  const std::size_t n = feature.size();
  if (n == 0 || threshold.size() != n || left.size() != n || right.size() != n ||
      value.size() != n) {
    throw std::invalid_argument("tree: inconsistent node arrays");
  }
  Tree t;
  t.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.nodes[i] = {feature[i], threshold[i], left[i], right[i], value[i]};
    if (feature[i] >= 0) {
      const auto ok = [n, i](int c) { return c > static_cast<int>(i) && c < static_cast<int>(n); };
      if (!ok(left[i]) || !ok(right[i])) throw std::invalid_argument("tree: bad child index");
    }
  }
  return t;
}

Tree grow_classification_tree(const MatrixView& x, std::span<const Label> y,
                              const ClassTreeParams& params, Rng& rng) {
  if (x.rows == 0 || x.rows != y.size()) {
    throw std::invalid_argument("grow_classification_tree: bad training shape");
  }
  TreeGrower grower(x, y, params, rng);
  return grower.grow();
}

DecisionTreeClassifier DecisionTreeClassifier::fit(const MatrixView& x, std::span<const Label> y,
                                                   const ClassTreeParams& params,
                                                   std::uint64_t seed) {
  Rng rng(seed);
  return DecisionTreeClassifier(grow_classification_tree(x, y, params, rng));
}

DecisionTreeClassifier DecisionTreeClassifier::load(const nlohmann::json& j) {
  return DecisionTreeClassifier(Tree::from_json(j.at("tree")));
}

ExtraTreesClassifier ExtraTreesClassifier::fit(const MatrixView& x, std::span<const Label> y,
                                               const ClassTreeParams& params, std::size_t n_trees,
                                               std::uint64_t seed) {
  ClassTreeParams p = params;
  p.rule = ThresholdRule::Random;
  if (p.max_features == 0) {
    p.max_features = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(x.cols)))));
  }
  std::vector<Tree> trees;
  trees.reserve(n_trees);
  for (std::size_t t = 0; t < n_trees; ++t) {
    Rng rng(derive_seed(seed, t));
    trees.push_back(grow_classification_tree(x, y, p, rng));
  }
  return ExtraTreesClassifier(std::move(trees));
}

double ExtraTreesClassifier::score(std::span<const double> x) const {
  double sum = 0.0;
  for (const Tree& t : trees_) sum += t.evaluate(x);
  return sum / static_cast<double>(trees_.size());
}

nlohmann::json ExtraTreesClassifier::save() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const Tree& t : trees_) arr.push_back(t.to_json());
  return {{"trees", std::move(arr)}};
}

ExtraTreesClassifier ExtraTreesClassifier::load(const nlohmann::json& j) {
  std::vector<Tree> trees;
  for (const auto& t : j.at("trees")) trees.push_back(Tree::from_json(t));
  if (trees.empty()) throw std::invalid_argument("extra trees: empty forest");
  return ExtraTreesClassifier(std::move(trees));
}

}  // namespace opentrend
