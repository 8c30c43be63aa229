#include "semred/metrics.hpp"

#include <sstream>

#include "semred/errors.hpp"

namespace semred {

Confusion& Confusion::operator+=(const Confusion& other)
{
  tp_op += other.tp_op;
  tp_ns += other.tp_ns;
  fp += other.fp;
  tn += other.tn;
  fn_op += other.fn_op;
  fn_ns += other.fn_ns;
  return *this;
}

Confusion confusion(const std::vector<TrialRecord>& trials)
{
  Confusion c;
  for (size_t i = 0; i < trials.size(); ++i) {
    const TrialRecord& rec = trials[i];
    if (!rec.prediction) {
      throw MetricError("trial " + std::to_string(i)
                        + " has no prediction; a confusion matrix needs a "
                          "model-annotated trace");
    }
    if (!rec.outcome) {
      throw MetricError("trial " + std::to_string(i)
                        + " has no oracle outcome; a confusion matrix needs "
                          "a study-mode trace");
    }
    const bool pred = *rec.prediction;
    switch (rec.outcome->kind) {
      case OracleOutcome::Kind::Passed:
        (pred ? c.tp_op : c.fn_op) += 1;
        break;
      case OracleOutcome::Kind::NonSemanticFail:
        (pred ? c.tp_ns : c.fn_ns) += 1;
        break;
      case OracleOutcome::Kind::SemanticFail:
        (pred ? c.fp : c.tn) += 1;
        break;
    }
  }
  return c;
}

std::optional<double> precision(const Confusion& c)
{
  const long denom = c.tp() + c.fp;
  if (denom == 0) return std::nullopt;
  return static_cast<double>(c.tp()) / static_cast<double>(denom);
}

std::optional<double> recall(const Confusion& c)
{
  const long denom = c.tp() + c.fn();
  if (denom == 0) return std::nullopt;
  return static_cast<double>(c.tp()) / static_cast<double>(denom);
}

std::map<IssueCode, IssueStats> issue_breakdown(
    const std::vector<TrialRecord>& trials)
{
  std::map<IssueCode, IssueStats> out;
  for (const TrialRecord& rec : trials) {
    if (!rec.outcome
        || rec.outcome->kind != OracleOutcome::Kind::SemanticFail) {
      continue;
    }
    // Skipped guided trials have no outcome; study traces always do.
    const bool caught = rec.prediction && !*rec.prediction;
    for (const SemanticIssue& issue : rec.outcome->issues) {
      IssueStats& stats = out[issue.code];
      (caught ? stats.filtered : stats.missed) += 1;
    }
  }
  return out;
}

Report summarize(const std::vector<TrialRecord>& trials, double wall_time)
{
  Report r;
  r.total_trials = static_cast<long>(trials.size());
  r.wall_time = wall_time;
  bool full_study = !trials.empty();
  for (const TrialRecord& rec : trials) {
    if (rec.executed) {
      ++r.oracle_queries;
    } else {
      ++r.skipped;
    }
    if (!rec.prediction || !rec.outcome) full_study = false;
  }
  if (!trials.empty()) {
    r.tokens_initial = trials.front().tokens_before;
    r.tokens_final = trials.back().tokens_after;
  }
  if (full_study) {
    r.matrix = confusion(trials);
    r.precision = precision(*r.matrix);
    r.recall = recall(*r.matrix);
    r.per_issue = issue_breakdown(trials);
  }
  return r;
}

std::string render_text(const Report& r)
{
  std::ostringstream out;
  out << "trials:         " << r.total_trials << '\n';
  out << "oracle queries: " << r.oracle_queries << '\n';
  out << "skipped:        " << r.skipped << '\n';
  out << "tokens:         " << r.tokens_initial << " -> " << r.tokens_final
      << '\n';
  out << "wall time:      " << r.wall_time << " s\n";
  if (r.matrix) {
    const Confusion& c = *r.matrix;
    out << "confusion:      tp=" << c.tp() << " (op=" << c.tp_op
        << ", ns=" << c.tp_ns << ") tn=" << c.tn << " fp=" << c.fp
        << " fn=" << c.fn() << " (op=" << c.fn_op << ", ns=" << c.fn_ns
        << ")\n";
    out << "precision:      "
        << (r.precision ? std::to_string(*r.precision) : "n/a") << '\n';
    out << "recall:         "
        << (r.recall ? std::to_string(*r.recall) : "n/a") << '\n';
    for (const auto& [code, stats] : r.per_issue) {
      out << "  " << issue_code_name(code) << ": filtered=" << stats.filtered
          << " missed=" << stats.missed << '\n';
    }
  }
  return out.str();
}

std::string csv_header()
{
  return "bug,time_s,tests,skips,size_tokens,precision,recall";
}

std::string render_csv_row(const Report& r, const std::string& name)
{
  std::ostringstream out;
  out << name << ',' << r.wall_time << ',' << r.oracle_queries << ','
      << r.skipped << ',' << r.tokens_final << ',';
  if (r.precision) out << *r.precision;
  out << ',';
  if (r.recall) out << *r.recall;
  return out.str();
}

}  // namespace semred
