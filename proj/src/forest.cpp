#include "semred/forest.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "json.hpp"
#include "semred/errors.hpp"
#include "semred/util.hpp"

namespace semred {

namespace {

struct Split
{
  double impurity;
  int feat;
  double thr;
};

/** Lexicographic preference: impurity, then feature id, then threshold. */
bool better(const Split& a, const Split& b)
{
  if (a.impurity != b.impurity) return a.impurity < b.impurity;
  if (a.feat != b.feat) return a.feat < b.feat;
  return a.thr < b.thr;
}

class TreeBuilder
{
 public:
  TreeBuilder(const std::vector<TrainingRow>& data, const ForestParams& p,
              int n_features, std::mt19937_64& rng)
      : data_(data), p_(p), n_features_(n_features), rng_(rng)
  {
  }

  std::vector<TreeNode> build(std::vector<int> samples)
  {
    nodes_.clear();
    grow(std::move(samples), 0);
    return std::move(nodes_);
  }

 private:
  long count_true(const std::vector<int>& samples) const
  {
    long n = 0;
    for (int s : samples) n += data_[s].label ? 1 : 0;
    return n;
  }

  int make_leaf(const std::vector<int>& samples)
  {
    long t = count_true(samples);
    TreeNode leaf;
    leaf.counts[0] = static_cast<long>(samples.size()) - t;
    leaf.counts[1] = t;
    nodes_.push_back(leaf);
    return static_cast<int>(nodes_.size()) - 1;
  }

  /** Distinct feature ids via partial Fisher-Yates; order is irrelevant
   *  because split preference breaks ties by feature id. */
  std::vector<int> sample_features(int k)
  {
    std::vector<int> all(n_features_);
    for (int i = 0; i < n_features_; ++i) all[i] = i;
    for (int i = 0; i < k; ++i) {
      int j = i + static_cast<int>(rng_() % (n_features_ - i));
      std::swap(all[i], all[j]);
    }
    all.resize(k);
    return all;
  }

  bool best_split(const std::vector<int>& samples,
                  const std::vector<int>& feats, Split& best) const
  {
    bool found = false;
    const long n = static_cast<long>(samples.size());
    std::vector<std::pair<int, bool>> vals(samples.size());
    for (int f : feats) {
      for (size_t i = 0; i < samples.size(); ++i) {
        vals[i] = {data_[samples[i]].features.values[f],
                   data_[samples[i]].label};
      }
      std::sort(vals.begin(), vals.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      long left_n = 0, left_t = 0;
      const long total_t = count_true(samples);
      for (size_t i = 0; i + 1 < vals.size(); ++i) {
        ++left_n;
        left_t += vals[i].second ? 1 : 0;
        if (vals[i].first == vals[i + 1].first) continue;
        long right_n = n - left_n;
        if (left_n < p_.min_samples_leaf || right_n < p_.min_samples_leaf) {
          continue;
        }
        long right_t = total_t - left_t;
        auto gini = [](long cnt, long trues) {
          double pt = static_cast<double>(trues) / static_cast<double>(cnt);
          double pf = 1.0 - pt;
          return 1.0 - pt * pt - pf * pf;
        };
        double weighted = (static_cast<double>(left_n) * gini(left_n, left_t)
                           + static_cast<double>(right_n)
                                 * gini(right_n, right_t))
                          / static_cast<double>(n);
        Split cand{weighted, f,
                   (static_cast<double>(vals[i].first)
                    + static_cast<double>(vals[i + 1].first))
                       / 2.0};
        if (!found || better(cand, best)) {
          best = cand;
          found = true;
        }
      }
    }
    return found;
  }

  int grow(std::vector<int> samples, int depth)
  {
    const long n = static_cast<long>(samples.size());
    const long t = count_true(samples);
    if (t == 0 || t == n || depth >= p_.max_depth
        || n < 2 * p_.min_samples_leaf) {
      return make_leaf(samples);
    }

    // The feature subsample is drawn before the fallback so the stream of
    // random values is the same whether or not the fallback is needed.
    std::vector<int> feats = sample_features(p_.features_per_split);
    Split best{0, 0, 0};
    bool found = best_split(samples, feats, best);
    if (!found && p_.features_per_split < n_features_) {
      std::vector<int> all(n_features_);
      for (int i = 0; i < n_features_; ++i) all[i] = i;
      found = best_split(samples, all, best);
    }
    if (!found) {
      return make_leaf(samples);
    }

    std::vector<int> left, right;
    for (int s : samples) {
      if (data_[s].features.values[best.feat] <= best.thr) {
        left.push_back(s);
      } else {
        right.push_back(s);
      }
    }

    TreeNode inner;
    inner.feat = best.feat;
    inner.thr = best.thr;
    nodes_.push_back(inner);
    int idx = static_cast<int>(nodes_.size()) - 1;
    int l = grow(std::move(left), depth + 1);
    int r = grow(std::move(right), depth + 1);
    nodes_[idx].left = l;
    nodes_[idx].right = r;
    return idx;
  }

  const std::vector<TrainingRow>& data_;
  const ForestParams& p_;
  int n_features_;
  std::mt19937_64& rng_;
  std::vector<TreeNode> nodes_;
};

nlohmann::json tree_node_to_json(const std::vector<TreeNode>& tree, int idx)
{
  const TreeNode& n = tree[idx];
  nlohmann::json j;
  if (n.is_leaf()) {
    j["counts"] = {n.counts[0], n.counts[1]};
  } else {
    j["feat"] = n.feat;
    j["thr"] = n.thr;
    j["left"] = tree_node_to_json(tree, n.left);
    j["right"] = tree_node_to_json(tree, n.right);
  }
  return j;
}

int tree_node_from_json(const nlohmann::json& j, std::vector<TreeNode>& tree)
{
  TreeNode n;
  int idx = static_cast<int>(tree.size());
  tree.push_back(n);
  if (j.contains("counts")) {
    tree[idx].counts[0] = j.at("counts").at(0).get<long>();
    tree[idx].counts[1] = j.at("counts").at(1).get<long>();
    if (tree[idx].counts[0] < 0 || tree[idx].counts[1] < 0
        || tree[idx].counts[0] + tree[idx].counts[1] == 0) {
      throw ModelError("leaf with empty or negative counts");
    }
  } else {
    tree[idx].feat = j.at("feat").get<int>();
    tree[idx].thr = j.at("thr").get<double>();
    if (tree[idx].feat < 0) {
      throw ModelError("internal node with negative feature id");
    }
    tree[idx].left = tree_node_from_json(j.at("left"), tree);
    tree[idx].right = tree_node_from_json(j.at("right"), tree);
  }
  return idx;
}

}  // namespace

bool Forest::predict_tree(size_t tree_index, const FeatureVector& x) const
{
  const std::vector<TreeNode>& tree = trees.at(tree_index);
  int at = 0;
  while (!tree[at].is_leaf()) {
    const TreeNode& n = tree[at];
    if (n.feat >= static_cast<int>(x.values.size())) {
      throw ModelError("feature vector too short for this model (got "
                       + std::to_string(x.values.size()) + " values, need > "
                       + std::to_string(n.feat) + ")");
    }
    at = x.values[n.feat] <= n.thr ? n.left : n.right;
  }
  // Leaf ties resolve to true, like the forest-level vote.
  return tree[at].counts[1] >= tree[at].counts[0];
}

bool Forest::predict(const FeatureVector& x) const
{
  if (x.mode != mode) {
    throw ModelError(std::string("feature mode mismatch: model wants ")
                     + feature_mode_name(mode) + ", got "
                     + feature_mode_name(x.mode));
  }
  if (trees.empty()) {
    throw ModelError("model has no trees");
  }
  if (n_features > 0 && static_cast<int>(x.values.size()) != n_features) {
    throw ModelError("feature vector length mismatch: model wants "
                     + std::to_string(n_features) + ", got "
                     + std::to_string(x.values.size()));
  }
  long votes = 0;
  for (size_t i = 0; i < trees.size(); ++i) {
    votes += predict_tree(i, x) ? 1 : 0;
  }
  return 2 * votes >= static_cast<long>(trees.size());
}

Forest train(const std::vector<TrainingRow>& data, const ForestParams& params,
             const std::string& grammar_hash)
{
  if (data.empty()) {
    throw ModelError("cannot train on an empty dataset");
  }
  if (params.n_trees < 1 || params.max_depth < 1
      || params.min_samples_leaf < 1 || params.features_per_split < 0) {
    throw ModelError("forest parameters must be positive");
  }

  const FeatureMode mode = data[0].features.mode;
  const int F = static_cast<int>(data[0].features.values.size());
  if (F == 0) {
    throw ModelError("feature vectors are empty");
  }
  for (const TrainingRow& row : data) {
    if (row.features.mode != mode
        || static_cast<int>(row.features.values.size()) != F) {
      throw ModelError("training rows disagree on feature mode or length");
    }
  }

  Forest f;
  f.mode = mode;
  f.grammar_hash = grammar_hash;
  f.n_features = F;
  f.params = params;
  if (f.params.features_per_split == 0) {
    f.params.features_per_split =
        static_cast<int>(std::ceil(std::sqrt(static_cast<double>(F))));
  }
  f.params.features_per_split = std::min(f.params.features_per_split, F);

  const long n = static_cast<long>(data.size());
  for (int ti = 0; ti < params.n_trees; ++ti) {
    std::mt19937_64 rng(
        fnv1a64_mix(fnv1a64_mix(0x9e3779b97f4a7c15ull, params.seed),
                    static_cast<uint64_t>(ti)));
    std::vector<int> samples(n);
    for (long i = 0; i < n; ++i) {
      samples[i] = static_cast<int>(rng() % static_cast<uint64_t>(n));
    }
    TreeBuilder builder(data, f.params, F, rng);
    f.trees.push_back(builder.build(std::move(samples)));
  }
  return f;
}

std::string Forest::to_json_string() const
{
  nlohmann::json doc;
  doc["version"] = 1;
  doc["mode"] = feature_mode_name(mode);
  doc["grammar_hash"] = grammar_hash;
  doc["params"] = {
      {"n_trees", params.n_trees},
      {"max_depth", params.max_depth},
      {"min_samples_leaf", params.min_samples_leaf},
      {"features_per_split", params.features_per_split},
      {"seed", params.seed},
  };
  nlohmann::json jtrees = nlohmann::json::array();
  for (const auto& tree : trees) {
    jtrees.push_back(tree_node_to_json(tree, 0));
  }
  doc["trees"] = std::move(jtrees);
  return doc.dump();
}

Forest Forest::from_json_string(const std::string& text)
{
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ModelError(std::string("model is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("version")) {
    throw ModelError("model file lacks a version field");
  }
  if (doc.at("version").get<int>() != 1) {
    throw ModelError("unsupported model version "
                     + doc.at("version").dump());
  }

  Forest f;
  f.mode = feature_mode_from_name(doc.at("mode").get<std::string>());
  f.grammar_hash = doc.at("grammar_hash").get<std::string>();
  const auto& jp = doc.at("params");
  f.params.n_trees = jp.at("n_trees").get<int>();
  f.params.max_depth = jp.at("max_depth").get<int>();
  f.params.min_samples_leaf = jp.at("min_samples_leaf").get<int>();
  f.params.features_per_split = jp.at("features_per_split").get<int>();
  f.params.seed = jp.at("seed").get<uint64_t>();
  for (const auto& jt : doc.at("trees")) {
    std::vector<TreeNode> tree;
    tree_node_from_json(jt, tree);
    f.trees.push_back(std::move(tree));
  }
  if (f.trees.empty()) {
    throw ModelError("model has no trees");
  }
  return f;
}

void save_forest(const Forest& f, const std::string& path)
{
  write_file(path, f.to_json_string() + "\n");
}

Forest load_forest(const std::string& path)
{
  return Forest::from_json_string(read_file(path));
}

Forest load_forest(const std::string& path, const Grammar& g)
{
  Forest f = load_forest(path);
  if (f.grammar_hash != g.hash()) {
    throw ModelError("model was trained for grammar hash " + f.grammar_hash
                     + " but the active grammar hashes to " + g.hash());
  }
  f.n_features = feature_length(f.mode, g.rule_count());
  return f;
}

}  // namespace semred
