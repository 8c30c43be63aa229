#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "semred/features.hpp"
#include "semred/forest.hpp"
#include "semred/grammar.hpp"

namespace semred {

/**
 * Why a trial got its label. A removal labeled true kept the program
 * semantically valid; the sub-outcome additionally records whether the
 * preserved token survived. Labels are derived as
 * label == (sub_outcome == SemValidTokenKept) and the redundancy is
 * cross-checked when a dataset file is loaded.
 */
enum class SubOutcome
{
  SemValidTokenKept,
  SemValidTokenLost,
  SemInvalid,
};

const char* sub_outcome_name(SubOutcome s);
SubOutcome sub_outcome_from_name(const std::string& name);

struct Datapoint
{
  FeatureVector features;
  bool label = false;
  SubOutcome sub_outcome = SubOutcome::SemInvalid;
  std::string source_file;
  int trial_index = 0;  // position within the source file's trials

  bool operator==(const Datapoint&) const = default;
};

struct Dataset
{
  FeatureMode mode = FeatureMode::Type;
  std::string grammar_hash;
  std::vector<Datapoint> rows;
};

/**
 * Harvest labeled trials from one program: repeatedly pick a random
 * not-yet-preserved token (by stable identity), run a baseline reduction
 * whose oracle demands semantic validity plus survival of that token, and
 * log every trial as a datapoint. The reduced tree carries over to the
 * next round; the loop ends when every remaining token has been preserved.
 * Deterministic for a given (grammar, source, seed).
 *
 * Throws on parse failures or semantically invalid input.
 */
std::vector<Datapoint> collect_from_source(const Grammar& g,
                                           const std::string& name,
                                           const std::string& source,
                                           FeatureMode mode, uint64_t seed);

/**
 * collect_from_source over a corpus of (name, text) pairs; files that fail
 * to parse or check are skipped with a note to `log` (stderr when null).
 * Each file's seed is derived from (seed, name), so results are
 * independent of corpus order.
 */
Dataset collect(const Grammar& g,
                const std::vector<std::pair<std::string, std::string>>& corpus,
                FeatureMode mode, uint64_t seed, std::ostream* log = nullptr);

/** Shuffle and split; `train_fraction` in (0,1), size = round(frac * n). */
std::pair<Dataset, Dataset> split_dataset(const Dataset& d,
                                          double train_fraction,
                                          uint64_t seed);

std::vector<TrainingRow> to_training_rows(const Dataset& d);

void write_dataset(const std::string& path, const Dataset& d);

/**
 * Read a JSONL dataset; all rows must agree on mode and grammar hash, and
 * each row's label must match its sub-outcome. When `expect_hash` is
 * non-empty it must match too.
 */
Dataset read_dataset(const std::string& path,
                     const std::string& expect_hash = "");

std::string datapoint_to_json_line(const Datapoint& p, FeatureMode mode,
                                   const std::string& grammar_hash);

/**
 * Deterministic mini-C program generator for exercising the pipeline.
 * Programs are semantically valid by construction: structs first, then
 * functions whose bodies declare, assign, call earlier functions with
 * exact arity, and return.
 */
std::string generate_program(uint64_t seed);
std::vector<std::pair<std::string, std::string>> generate_corpus(
    int count, uint64_t seed, const std::string& name_prefix = "gen");

}  // namespace semred
