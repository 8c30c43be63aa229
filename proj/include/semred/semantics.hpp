#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "semred/syntax_tree.hpp"

namespace semred {

enum class IssueCode
{
  UndeclaredIdentifier,
  UndeclaredType,
  EmptyDeclaration,
  TooManyArguments,
  MissingTypeSpecifier,
};

const char* issue_code_name(IssueCode code);
IssueCode issue_code_from_name(const std::string& name);

struct SemanticIssue
{
  IssueCode code;
  std::string subject;  // offending identifier or token text
  int location;         // token index in the checked tree

  bool operator==(const SemanticIssue&) const = default;
};

/** Kind of a declared name. */
enum class NameKind
{
  Variable,
  Function,
  StructTag,
};

struct NameInfo
{
  NameKind kind = NameKind::Variable;
  int arity = 0;  // parameter count for functions
};

/**
 * Nested scopes mapping identifiers to declared kinds. Lookups resolve
 * innermost-first; re-declaring a name shadows (or, within one scope,
 * overwrites) the previous binding. Struct tags live alongside other names
 * but are resolved with a kind filter, so a variable never hides a tag.
 */
class ScopeTable
{
 public:
  void push();
  void pop();
  size_t depth() const { return scopes_.size(); }

  void declare(const std::string& name, NameInfo info);
  std::optional<NameInfo> lookup(const std::string& name) const;
  bool tag_declared(const std::string& name) const;

 private:
  std::vector<std::map<std::string, NameInfo>> scopes_;
};

/**
 * Check a mini-C tree and return all issues sorted by token location.
 * The five issue codes cover: use of an undeclared identifier (identifiers
 * in call position are exempt, mirroring implicit function declarations),
 * reference to an undeclared struct tag, declarations that declare nothing,
 * calls with more arguments than the callee's declared parameter count, and
 * declarators without a type specifier. Member access requires only that
 * the base variable is declared; member names themselves are not resolved.
 *
 * Pure: identical trees yield identical issue lists.
 */
std::vector<SemanticIssue> check(const SyntaxTree& t);

/** True when check(t) finds nothing. */
bool is_valid(const SyntaxTree& t);

}  // namespace semred
