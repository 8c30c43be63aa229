#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semred/grammar.hpp"

namespace semred {

using NodeId = int;

/**
 * A node of a concrete syntax tree. Terminal leaves carry the pseudo rule id
 * grammar.terminal_id(); all other nodes carry a real rule id. Spans are
 * half-open token intervals into the tree's current token list, and a node's
 * weight is its span length.
 */
struct Node
{
  NodeId id = -1;
  int rule = -1;
  int span_begin = 0;
  int span_end = 0;
  NodeId parent = -1;
  std::vector<NodeId> children;
  Quantifier quant = Quantifier::One;  // of the producing symbol occurrence
  int slot = -1;  // symbol position in the parent alternative; -1 for root
  bool removable = false;
  bool alive = true;

  int weight() const { return span_end - span_begin; }
};

/**
 * Concrete syntax tree over a grammar. Node ids are stable across removals;
 * removed nodes stay in the store marked dead. Tokens are kept as live text
 * plus a parallel list of stable token identities (their index in the
 * original input), which survive removals.
 *
 * The referenced Grammar must outlive the tree.
 */
class SyntaxTree
{
 public:
  SyntaxTree(const Grammar& g) : grammar_(&g) {}

  const Grammar& grammar() const { return *grammar_; }
  NodeId root() const { return root_; }

  /** True when the id names a live node. */
  bool contains(NodeId id) const
  {
    return id >= 0 && id < static_cast<int>(nodes_.size())
           && nodes_[id].alive;
  }

  /** Live node by id; throws NodeError for unknown or dead ids. */
  const Node& node(NodeId id) const;

  int token_count() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::vector<int>& token_ids() const { return token_ids_; }
  bool has_token_id(int stable_id) const;

  /** Text of the single token of a terminal leaf. */
  const std::string& terminal_text(NodeId id) const;

  /** Live node ids in increasing order. */
  std::vector<NodeId> live_nodes() const;

  // Mutating access for the builders in syntax_tree.cpp.
  std::vector<Node>& store() { return nodes_; }
  const std::vector<Node>& store() const { return nodes_; }
  std::vector<std::string>& token_store() { return tokens_; }
  std::vector<int>& token_id_store() { return token_ids_; }
  void set_root(NodeId id) { root_ = id; }

 private:
  const Grammar* grammar_;
  std::vector<Node> nodes_;
  std::vector<std::string> tokens_;
  std::vector<int> token_ids_;
  NodeId root_ = -1;
};

/**
 * Parse source text against the grammar's start rule. Alternatives are tried
 * in order and the first match wins; quantified symbols match greedily.
 * The whole token stream must be consumed. Throws LexError or ParseError.
 */
SyntaxTree parse(const Grammar& g, const std::string& source);

/**
 * Copy the tree with the subtree rooted at `id` removed. `id` must be live
 * and removable. When the removed node came from a `plus` occurrence and
 * exactly one sibling of the same slot remains, that sibling loses its
 * removable flag.
 */
SyntaxTree remove_node(const SyntaxTree& t, NodeId id);

/**
 * Nearest removable descendants of `start`: walks down from each id,
 * emitting removable nodes and descending through non-removable ones.
 * The result is an antichain in breadth-first order.
 */
std::vector<NodeId> removable_frontier(const SyntaxTree& t,
                                       const std::vector<NodeId>& start);

/** Render the tree's tokens; newline after ";", "{" and "}". */
std::string print(const SyntaxTree& t);

/** Serialize to the interchange JSON (tokens/nodes/root). */
std::string tree_to_json(const SyntaxTree& t);

/** Rebuild a tree from interchange JSON; validates rule ids and spans. */
SyntaxTree tree_from_json(const Grammar& g, const std::string& json_text);

}  // namespace semred
