#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "semred/reducer.hpp"
#include "semred/semantics.hpp"

namespace semred {

/**
 * Trial taxonomy. The positive class is "semantically valid to remove":
 * a trial counts as positive when its outcome is anything but SemanticFail.
 * True positives and false negatives split further by whether the oracle
 * passed outright (op: property held) or failed non-semantically (ns).
 * Six disjoint buckets cover every (prediction, outcome) pair:
 * tp_op + tp_ns + fp + tn + fn_op + fn_ns == total trials.
 */
struct Confusion
{
  long tp_op = 0;
  long tp_ns = 0;
  long fp = 0;
  long tn = 0;
  long fn_op = 0;
  long fn_ns = 0;

  long tp() const { return tp_op + tp_ns; }
  long fn() const { return fn_op + fn_ns; }
  long total() const { return tp() + fp + tn + fn(); }

  Confusion& operator+=(const Confusion& other);
};

/**
 * Tally a study trace. Every record must carry both a prediction and an
 * outcome; MetricError otherwise (baseline traces lack predictions, guided
 * traces lack outcomes on skipped trials).
 */
Confusion confusion(const std::vector<TrialRecord>& trials);

/** tp / (tp + fp); absent when the denominator is zero. */
std::optional<double> precision(const Confusion& c);

/** tp / (tp + fn); absent when the denominator is zero. */
std::optional<double> recall(const Confusion& c);

/**
 * Per-issue-code counts across a study trace's SemanticFail outcomes:
 * `filtered` when the model predicted invalid (caught), `missed` when it
 * predicted valid (a false positive for that code).
 */
struct IssueStats
{
  long filtered = 0;
  long missed = 0;
};

std::map<IssueCode, IssueStats> issue_breakdown(
    const std::vector<TrialRecord>& trials);

/**
 * Summary of one reduction run. Precision/recall and the issue breakdown
 * are present only when every record carries prediction and outcome
 * (study traces).
 */
struct Report
{
  long total_trials = 0;
  long oracle_queries = 0;
  long skipped = 0;
  int tokens_initial = 0;
  int tokens_final = 0;
  double wall_time = 0.0;
  std::optional<Confusion> matrix;
  std::optional<double> precision;
  std::optional<double> recall;
  std::map<IssueCode, IssueStats> per_issue;
};

Report summarize(const std::vector<TrialRecord>& trials, double wall_time);

std::string render_text(const Report& r);

/** CSV: header "bug,time_s,tests,skips,size_tokens,precision,recall". */
std::string csv_header();
std::string render_csv_row(const Report& r, const std::string& name);

}  // namespace semred
