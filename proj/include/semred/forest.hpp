#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semred/features.hpp"
#include "semred/grammar.hpp"

namespace semred {

/**
 * Random-forest hyperparameters. `features_per_split` may be left at 0 to
 * mean "decide from the data" (ceil of the square root of the feature
 * count); the resolved value is stored on the trained forest.
 */
struct ForestParams
{
  int n_trees = 100;
  int max_depth = 16;
  int min_samples_leaf = 1;
  int features_per_split = 0;
  uint64_t seed = 0;
};

struct TrainingRow
{
  FeatureVector features;
  bool label;  // true: removal keeps the candidate semantically valid
};

/** Binary decision-tree node; feat < 0 marks a leaf. */
struct TreeNode
{
  int feat = -1;
  double thr = 0.0;
  int left = -1;
  int right = -1;
  long counts[2] = {0, 0};  // leaf label counts: [false, true]

  bool is_leaf() const { return feat < 0; }
  bool operator==(const TreeNode&) const = default;
};

/**
 * Bagged ensemble of CART trees over integer feature vectors, majority
 * vote with ties resolved to true. Splits test `value <= threshold`;
 * thresholds are midpoints between adjacent observed values. Training is
 * deterministic given data order and seed.
 */
class Forest
{
 public:
  FeatureMode mode = FeatureMode::Type;
  std::string grammar_hash;
  ForestParams params;
  std::vector<std::vector<TreeNode>> trees;
  // Expected feature-vector length. Set by train() and by grammar-checked
  // loads; 0 (unknown) after a plain load, which then only bounds-checks.
  int n_features = 0;

  /** Majority vote; throws ModelError on mode or length mismatch. */
  bool predict(const FeatureVector& x) const;

  /** Single-tree vote, mostly for tests. */
  bool predict_tree(size_t tree_index, const FeatureVector& x) const;

  std::string to_json_string() const;
  static Forest from_json_string(const std::string& text);
};

/**
 * Train on `data` (uniform mode and length required, at least one row).
 * Per-tree randomness is derived only from (seed, tree index), so results
 * do not depend on how many trees train or in which order.
 */
Forest train(const std::vector<TrainingRow>& data, const ForestParams& params,
             const std::string& grammar_hash);

void save_forest(const Forest& f, const std::string& path);

/** Load without grammar validation. */
Forest load_forest(const std::string& path);

/** Load and require the stored grammar hash to match `g`. */
Forest load_forest(const std::string& path, const Grammar& g);

}  // namespace semred
