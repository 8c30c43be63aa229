#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "semred/semantics.hpp"
#include "semred/syntax_tree.hpp"

namespace semred {

/**
 * Three-way oracle verdict. SemanticFail means the candidate was rejected
 * by the semantic checker (issues lists why); NonSemanticFail covers every
 * other rejection: failed parse/property, non-zero exit, timeout. Issues
 * are non-empty exactly for SemanticFail.
 */
struct OracleOutcome
{
  enum class Kind
  {
    Passed,
    SemanticFail,
    NonSemanticFail,
  };

  Kind kind = Kind::Passed;
  std::vector<SemanticIssue> issues;
  double duration = 0.0;  // seconds spent producing the verdict

  bool passed() const { return kind == Kind::Passed; }
  bool operator==(const OracleOutcome&) const = default;
};

const char* outcome_kind_name(OracleOutcome::Kind kind);
OracleOutcome::Kind outcome_kind_from_name(const std::string& name);

/** External command plus the timeout applied to each invocation. */
struct CommandSpec
{
  std::string program;
  std::vector<std::string> args;
  double timeout_seconds = 10.0;
};

/**
 * Write `candidate_text` to a fresh temp file, run the command with the
 * file path appended as final argument, and report whether it exited 0.
 * A candidate that runs past the timeout is killed and counts as false;
 * a line describing the timeout goes to `log` (stderr when null).
 * Throws OracleError when the process cannot be spawned.
 */
bool run_external(const CommandSpec& cmd, const std::string& candidate_text,
                  std::ostream* log = nullptr);

/** Interestingness test consulted by the reduction loops. */
class Oracle
{
 public:
  virtual ~Oracle() = default;
  virtual OracleOutcome run(const SyntaxTree& candidate) = 0;
};

/** Oracle backed by an external command (binary verdict). */
class ExternalOracle : public Oracle
{
 public:
  ExternalOracle(CommandSpec cmd, std::ostream* log = nullptr)
      : cmd_(std::move(cmd)), log_(log)
  {
  }

  OracleOutcome run(const SyntaxTree& candidate) override;

 private:
  CommandSpec cmd_;
  std::ostream* log_;
};

using CheckerFn = std::function<std::vector<SemanticIssue>(const SyntaxTree&)>;
using PropertyFn = std::function<bool(const SyntaxTree&)>;

/**
 * Semantic validity before property of interest: a candidate with checker
 * issues is a SemanticFail carrying them; otherwise the property decides
 * between Passed and NonSemanticFail.
 */
OracleOutcome run_composite(const CheckerFn& sem, const PropertyFn& prop,
                            const SyntaxTree& candidate);

/** In-process oracle combining the semantic checker with a property. */
class CompositeOracle : public Oracle
{
 public:
  explicit CompositeOracle(PropertyFn prop,
                           CheckerFn sem = [](const SyntaxTree& t) {
                             return check(t);
                           })
      : sem_(std::move(sem)), prop_(std::move(prop))
  {
  }

  OracleOutcome run(const SyntaxTree& candidate) override
  {
    return run_composite(sem_, prop_, candidate);
  }

 private:
  CheckerFn sem_;
  PropertyFn prop_;
};

}  // namespace semred
