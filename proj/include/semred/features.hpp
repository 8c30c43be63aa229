#pragma once

#include <string>
#include <vector>

#include "semred/syntax_tree.hpp"

namespace semred {

/**
 * Feature encodings for a query node, over a grammar with R rule types.
 * All encodings are bag-of-words: bits record presence, not counts.
 *
 *   Type             [type_id]                         length 1
 *   Children         bit per rule type + terminal bit  length R + 1
 *   Path             bit per rule type                 length R
 *   Type+Children    concatenation                     length R + 2
 *   Type+Children+Path                                 length 2R + 2
 *
 * The terminal bit lives at index R of the children block. The path runs
 * from the query node to the root, both included.
 */
enum class FeatureMode
{
  Type,
  Children,
  Path,
  TypeChildren,
  TypeChildrenPath,
};

const char* feature_mode_name(FeatureMode mode);
FeatureMode feature_mode_from_name(const std::string& name);

/** Encoded vector length for a grammar with `rule_count` rule types. */
int feature_length(FeatureMode mode, int rule_count);

struct FeatureVector
{
  FeatureMode mode = FeatureMode::Type;
  std::vector<int> values;

  bool operator==(const FeatureVector&) const = default;
};

/**
 * Encode node `n` of tree `t`. The node must be live and a rule node;
 * terminals have no feature encoding.
 */
FeatureVector extract(const SyntaxTree& t, NodeId n, FeatureMode mode);

}  // namespace semred
