#include "semred/reducer.hpp"

#include <chrono>
#include <fstream>
#include <queue>
#include <sstream>

#include "json.hpp"
#include "semred/errors.hpp"

namespace semred {

namespace {

struct QueueEntry
{
  int weight;
  int position;  // span start at enqueue time
  NodeId node;
};

/** Max-heap: heaviest first, then leftmost, then lowest id. */
struct EntryLess
{
  bool operator()(const QueueEntry& a, const QueueEntry& b) const
  {
    if (a.weight != b.weight) return a.weight < b.weight;
    if (a.position != b.position) return a.position > b.position;
    return a.node > b.node;
  }
};

using Queue = std::priority_queue<QueueEntry, std::vector<QueueEntry>,
                                  EntryLess>;

void push_frontier(Queue& q, const SyntaxTree& t,
                   const std::vector<NodeId>& below)
{
  for (NodeId id : removable_frontier(t, below)) {
    const Node& n = t.node(id);
    q.push({n.weight(), n.span_begin, id});
  }
}

double seconds_since(std::chrono::steady_clock::time_point start)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now()
                                       - start)
      .count();
}

ReduceResult reduce_core(const SyntaxTree& t0, Oracle& oracle,
                         const Model* model,
                         std::optional<FeatureMode> mode, bool study,
                         int passes,
                         std::optional<FeatureMode> record_features)
{
  if (model && mode && model->mode() && *model->mode() != *mode) {
    throw ModelError(std::string("model predicts from ")
                     + feature_mode_name(*model->mode())
                     + " features but the run asked for "
                     + feature_mode_name(*mode));
  }
  const auto t_start = std::chrono::steady_clock::now();
  if (!oracle.run(t0).passed()) {
    throw OracleError("the oracle rejects the initial input");
  }

  ReduceResult result{t0, {}, 0.0, t0.token_count(), 0, 0, 0};
  SyntaxTree& t = result.tree;

  for (int pass = 0; pass < passes; ++pass) {
    const int before_pass = t.token_count();

    Queue queue;
    push_frontier(queue, t, t.node(t.root()).children);
    while (!queue.empty()) {
      QueueEntry entry = queue.top();
      queue.pop();
      if (!t.contains(entry.node)) {
        continue;  // removed as part of an earlier subtree
      }
      const Node& node = t.node(entry.node);
      std::vector<NodeId> children = node.children;
      if (!node.removable) {
        // Lost its flag (last plus sibling); not a trial, explore below.
        push_frontier(queue, t, children);
        continue;
      }

      const auto trial_start = std::chrono::steady_clock::now();
      TrialRecord rec;
      rec.node = entry.node;
      rec.tokens_before = t.token_count();
      if (record_features) {
        rec.features = extract(t, entry.node, *record_features);
      }
      bool predicted_valid = true;
      if (model) {
        predicted_valid = model->predict(
            t, entry.node, rec.features ? &*rec.features : nullptr);
        rec.prediction = predicted_valid;
      }

      if (!model || study || predicted_valid) {
        SyntaxTree candidate = remove_node(t, entry.node);
        rec.outcome = oracle.run(candidate);
        rec.executed = true;
        ++result.oracle_queries;
        if (rec.outcome->passed()) {
          t = std::move(candidate);
        } else {
          push_frontier(queue, t, children);
        }
      } else {
        rec.executed = false;
        ++result.skipped;
        push_frontier(queue, t, children);
      }
      rec.tokens_after = t.token_count();
      rec.elapsed = seconds_since(trial_start);
      result.trials.push_back(std::move(rec));
    }

    if (t.token_count() == before_pass) {
      break;
    }
  }

  result.tokens_final = t.token_count();
  result.wall_time = seconds_since(t_start);
  return result;
}

}  // namespace

bool ForestModel::predict(const SyntaxTree& t, NodeId n,
                          const FeatureVector* features) const
{
  if (features) {
    return forest_->predict(*features);
  }
  return forest_->predict(extract(t, n, forest_->mode));
}

ReduceResult reduce_baseline(const SyntaxTree& t, Oracle& oracle, int passes,
                             std::optional<FeatureMode> record_features)
{
  return reduce_core(t, oracle, nullptr, std::nullopt, false, passes,
                     record_features);
}

ReduceResult reduce_guided(const SyntaxTree& t, Oracle& oracle,
                           const Model& m, FeatureMode mode, int passes)
{
  return reduce_core(t, oracle, &m, mode, false, passes, mode);
}

ReduceResult reduce_study(const SyntaxTree& t, Oracle& oracle, const Model& m,
                          FeatureMode mode, int passes)
{
  return reduce_core(t, oracle, &m, mode, true, passes, mode);
}

std::string trial_to_json_line(const TrialRecord& rec)
{
  nlohmann::json j;
  j["node"] = rec.node;
  if (rec.features) {
    j["features"] = {{"mode", feature_mode_name(rec.features->mode)},
                     {"values", rec.features->values}};
  } else {
    j["features"] = nullptr;
  }
  if (rec.prediction) {
    j["prediction"] = *rec.prediction;
  } else {
    j["prediction"] = nullptr;
  }
  if (rec.outcome) {
    nlohmann::json issues = nlohmann::json::array();
    for (const SemanticIssue& issue : rec.outcome->issues) {
      issues.push_back({{"code", issue_code_name(issue.code)},
                        {"subject", issue.subject},
                        {"at", issue.location}});
    }
    j["outcome"] = {{"kind", outcome_kind_name(rec.outcome->kind)},
                    {"issues", std::move(issues)},
                    {"duration", rec.outcome->duration}};
  } else {
    j["outcome"] = nullptr;
  }
  j["executed"] = rec.executed;
  j["tokens_before"] = rec.tokens_before;
  j["tokens_after"] = rec.tokens_after;
  j["elapsed"] = rec.elapsed;
  return j.dump();
}

TrialRecord trial_from_json_line(const std::string& line)
{
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(std::string("trace line is not valid JSON: ") + e.what());
  }
  TrialRecord rec;
  rec.node = j.at("node").get<NodeId>();
  if (j.contains("features") && !j.at("features").is_null()) {
    FeatureVector fv;
    fv.mode =
        feature_mode_from_name(j.at("features").at("mode").get<std::string>());
    fv.values = j.at("features").at("values").get<std::vector<int>>();
    rec.features = std::move(fv);
  }
  if (j.contains("prediction") && !j.at("prediction").is_null()) {
    rec.prediction = j.at("prediction").get<bool>();
  }
  if (j.contains("outcome") && !j.at("outcome").is_null()) {
    OracleOutcome out;
    out.kind =
        outcome_kind_from_name(j.at("outcome").at("kind").get<std::string>());
    for (const auto& ji : j.at("outcome").at("issues")) {
      out.issues.push_back({issue_code_from_name(
                                ji.at("code").get<std::string>()),
                            ji.at("subject").get<std::string>(),
                            ji.at("at").get<int>()});
    }
    out.duration = j.at("outcome").at("duration").get<double>();
    rec.outcome = std::move(out);
  }
  rec.executed = j.at("executed").get<bool>();
  rec.tokens_before = j.at("tokens_before").get<int>();
  rec.tokens_after = j.at("tokens_after").get<int>();
  rec.elapsed = j.at("elapsed").get<double>();
  return rec;
}

void write_trace(const std::string& path,
                 const std::vector<TrialRecord>& trials)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot write trace '" + path + "'");
  }
  for (const TrialRecord& rec : trials) {
    out << trial_to_json_line(rec) << '\n';
  }
}

std::vector<TrialRecord> read_trace(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open trace '" + path + "'");
  }
  std::vector<TrialRecord> trials;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    trials.push_back(trial_from_json_line(line));
  }
  return trials;
}

}  // namespace semred
