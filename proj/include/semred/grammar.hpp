#pragma once

#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace semred {

/**
 * Quantifier attached to a symbol occurrence inside an alternative.
 * `opt` and `star` occurrences are always removable from a tree; a `plus`
 * occurrence is removable while at least one sibling of the same slot
 * remains.
 */
enum class Quantifier
{
  One,
  Opt,
  Star,
  Plus,
};

const char* quantifier_name(Quantifier q);
Quantifier quantifier_from_name(const std::string& name);

enum class SymbolKind
{
  Ref,    // reference to another rule
  Lit,    // literal token text
  Class,  // token class: "id", "num" or "str"
};

struct Symbol
{
  SymbolKind kind = SymbolKind::Ref;
  std::string text;  // rule name, literal text, or class name
  int rule = -1;     // resolved rule id for Ref symbols
  Quantifier quant = Quantifier::One;
};

struct RuleDef
{
  std::string name;
  std::vector<std::vector<Symbol>> alts;
  // Rules named with a leading '_' are transparent: each alternative must be
  // a single unquantified Ref, and the matched child replaces the rule node
  // in the tree, inheriting the occurrence's quantifier and slot.
  bool transparent = false;
};

/**
 * A quantified grammar in the JSON format
 *   {"start": "...", "rules": [{"name": "...", "alts": [[symbol...]...]}...]}
 * where a symbol is {"ref"|"lit"|"class": "...", "q": "one|opt|star|plus"}
 * ("q" defaults to "one").
 *
 * Rule ids are assigned in file order starting at 0; rule_count() (R)
 * doubles as the id of the pseudo rule "terminal" used by feature vectors.
 * Quantifiers other than "one" are rejected on lit/class symbols so that
 * every removable tree node is a rule node.
 */
class Grammar
{
 public:
  /** Parse a grammar from JSON text. The hash is FNV-1a 64 of the text. */
  static Grammar from_json(const std::string& text);

  int rule_count() const { return static_cast<int>(rules_.size()); }
  int terminal_id() const { return rule_count(); }
  int start_rule() const { return start_; }

  /** Id for a rule name; throws GrammarError for unknown names. */
  int rule_id(const std::string& name) const;
  bool has_rule(const std::string& name) const;

  const RuleDef& rule(int id) const;
  const std::string& rule_name(int id) const;

  /** Hex digest of the grammar file text; stored in datasets and models. */
  const std::string& hash() const { return hash_; }

  /** Literal symbols that look like identifiers; excluded from class "id". */
  const std::unordered_set<std::string>& keywords() const { return keywords_; }

 private:
  std::vector<RuleDef> rules_;
  std::unordered_map<std::string, int> ids_;
  std::unordered_set<std::string> keywords_;
  int start_ = -1;
  std::string hash_;
};

/** Load and validate a grammar file. */
Grammar load_grammar(const std::string& path);

}  // namespace semred
