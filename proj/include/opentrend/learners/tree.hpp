#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "opentrend/learners/classifier.hpp"
#include "opentrend/random.hpp"

namespace opentrend {

// Binary tree stored as a flat node array; node 0 is the root. Internal nodes
// send x to `left` when x[feature] <= threshold.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
};

class Tree {
 public:
  std::vector<TreeNode> nodes;

  double evaluate(std::span<const double> x) const {
    int i = 0;
    while (!nodes[static_cast<std::size_t>(i)].is_leaf()) {
      const TreeNode& n = nodes[static_cast<std::size_t>(i)];
      i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(i)].value;
  }

  int depth() const;
  // Sorted, de-duplicated feature indices used by any split.
  std::vector<int> split_features() const;

  nlohmann::json to_json() const;
  static Tree from_json(const nlohmann::json& j);
};

enum class Impurity { Gini, Entropy };

enum class ThresholdRule {
  // Every cut between adjacent distinct values; the stored threshold is the
  // largest value sent left, so splits depend only on the order of values.
  Exhaustive,
  // One uniform random cut in (min, max) per candidate feature.
  Random,
};

struct ClassTreeParams {
  int max_depth = -1;             // -1: unlimited
  std::size_t max_features = 0;   // 0: all columns
  Impurity impurity = Impurity::Gini;
  ThresholdRule rule = ThresholdRule::Exhaustive;
  std::size_t min_samples_split = 2;
  std::size_t min_samples_leaf = 1;
};

// Grows a classification tree whose leaf values are the fraction of label 1.
// Candidate features per node are drawn without replacement from `rng`
// (constant columns skipped) and then evaluated in ascending column order;
// equal gains keep the lowest column, then the lowest threshold.
Tree grow_classification_tree(const MatrixView& x, std::span<const Label> y,
                              const ClassTreeParams& params, Rng& rng);

class DecisionTreeClassifier final : public Classifier {
 public:
  explicit DecisionTreeClassifier(Tree tree) : tree_(std::move(tree)) {}
  static DecisionTreeClassifier fit(const MatrixView& x, std::span<const Label> y,
                                    const ClassTreeParams& params, std::uint64_t seed);

  double score(std::span<const double> x) const override { return tree_.evaluate(x); }
  nlohmann::json save() const override { return {{"tree", tree_.to_json()}}; }
  static DecisionTreeClassifier load(const nlohmann::json& j);

  const Tree& tree() const { return tree_; }

 private:
  Tree tree_;
};

// Extremely randomized trees: every tree sees all rows, split thresholds are
// random, and the score is the mean leaf probability. Tree i is seeded with
// derive_seed(seed, i).
class ExtraTreesClassifier final : public Classifier {
 public:
  explicit ExtraTreesClassifier(std::vector<Tree> trees) : trees_(std::move(trees)) {}
  static ExtraTreesClassifier fit(const MatrixView& x, std::span<const Label> y,
                                  const ClassTreeParams& params, std::size_t n_trees,
                                  std::uint64_t seed);

  double score(std::span<const double> x) const override;
  nlohmann::json save() const override;
  static ExtraTreesClassifier load(const nlohmann::json& j);

  const std::vector<Tree>& trees() const { return trees_; }

 private:
  std::vector<Tree> trees_;
};

}  // namespace opentrend
