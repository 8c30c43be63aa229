#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "semred/features.hpp"
#include "semred/forest.hpp"
#include "semred/oracle.hpp"
#include "semred/syntax_tree.hpp"

namespace semred {

/**
 * One candidate removal considered by a reduction loop. `executed` tells
 * whether the oracle actually ran; when a model vetoed the trial the
 * outcome is absent. Features are recorded whenever a feature mode is
 * configured, predictions whenever a model is.
 */
struct TrialRecord
{
  NodeId node = -1;
  std::optional<FeatureVector> features;
  std::optional<bool> prediction;
  std::optional<OracleOutcome> outcome;
  bool executed = false;
  int tokens_before = 0;
  int tokens_after = 0;
  double elapsed = 0.0;  // seconds spent on this trial

  bool operator==(const TrialRecord&) const = default;
};

/**
 * Predicts whether removing node `n` from `t` keeps the program
 * semantically valid (true = valid, worth querying the oracle).
 * Feature-based models report their mode so the engine can check it
 * against the requested one; oracle-like stand-ins return nullopt and
 * may ignore `features`.
 */
class Model
{
 public:
  virtual ~Model() = default;
  virtual std::optional<FeatureMode> mode() const { return std::nullopt; }
  virtual bool predict(const SyntaxTree& t, NodeId n,
                       const FeatureVector* features) const = 0;
};

/** Model backed by a trained forest. */
class ForestModel : public Model
{
 public:
  explicit ForestModel(const Forest& f) : forest_(&f) {}

  std::optional<FeatureMode> mode() const override { return forest_->mode; }
  bool predict(const SyntaxTree& t, NodeId n,
               const FeatureVector* features) const override;

 private:
  const Forest* forest_;
};

/** Model defined by a callback; used for stubs and ground-truth models. */
class CallbackModel : public Model
{
 public:
  using Fn = std::function<bool(const SyntaxTree&, NodeId)>;
  explicit CallbackModel(Fn fn) : fn_(std::move(fn)) {}

  bool predict(const SyntaxTree& t, NodeId n,
               const FeatureVector*) const override
  {
    return fn_(t, n);
  }

 private:
  Fn fn_;
};

struct ReduceResult
{
  SyntaxTree tree;
  std::vector<TrialRecord> trials;
  double wall_time = 0.0;
  int tokens_initial = 0;
  int tokens_final = 0;
  long oracle_queries = 0;  // executed trials
  long skipped = 0;         // model-vetoed trials
};

/**
 * Weight-descending removal loop: a priority queue seeded with the
 * removable frontier below the root is drained by popping the heaviest
 * node (ties: leftmost span start, then lowest id), querying the oracle on
 * the tree without it, keeping the smaller tree on success and otherwise
 * expanding the node's removable frontier back into the queue. Entries
 * whose node has died since being queued are discarded; entries whose node
 * lost its removable flag expand their frontier without a trial. With
 * `passes` > 1 the loop restarts until a pass removes nothing.
 *
 * All engines require the initial tree to pass the oracle and throw
 * OracleError otherwise. `record_features` attaches feature vectors to
 * every trial record (used by data collection).
 */
ReduceResult reduce_baseline(
    const SyntaxTree& t, Oracle& oracle, int passes = 1,
    std::optional<FeatureMode> record_features = std::nullopt);

/**
 * Model-guided loop: before each trial the model predicts whether the
 * removal stays semantically valid. Predicted-invalid candidates skip the
 * oracle entirely and expand their frontier. `mode` must agree with the
 * model's mode when it has one.
 */
ReduceResult reduce_guided(const SyntaxTree& t, Oracle& oracle,
                           const Model& m, FeatureMode mode, int passes = 1);

/**
 * Study variant of the guided loop: predictions are recorded but the
 * oracle runs on every trial and alone decides acceptance, so the trace
 * supports a full confusion matrix.
 */
ReduceResult reduce_study(const SyntaxTree& t, Oracle& oracle, const Model& m,
                          FeatureMode mode, int passes = 1);

/** One record per line, JSON. */
void write_trace(const std::string& path,
                 const std::vector<TrialRecord>& trials);
std::vector<TrialRecord> read_trace(const std::string& path);

std::string trial_to_json_line(const TrialRecord& rec);
TrialRecord trial_from_json_line(const std::string& line);

}  // namespace semred
