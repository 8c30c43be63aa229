#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "semred/datagen.hpp"
#include "semred/errors.hpp"
#include "semred/reducer.hpp"
#include "semred/semantics.hpp"

using namespace semred;
using test_helpers::mini_c;
using test_helpers::nodes_of_rule;
using test_helpers::the_node;

namespace {

PropertyFn keep_text(std::string text)
{
  return [text = std::move(text)](const SyntaxTree& t) {
    const auto& toks = t.tokens();
    return std::find(toks.begin(), toks.end(), text) != toks.end();
  };
}

/** Comparison view that ignores timing and model-only fields. */
struct TrialKey
{
  NodeId node;
  bool executed;
  int kind;  // -1 when skipped
  int tokens_before;
  int tokens_after;

  bool operator==(const TrialKey&) const = default;
};

std::vector<TrialKey> keys(const std::vector<TrialRecord>& trials)
{
  std::vector<TrialKey> out;
  for (const auto& r : trials) {
    out.push_back({r.node, r.executed,
                   r.outcome ? static_cast<int>(r.outcome->kind) : -1,
                   r.tokens_before, r.tokens_after});
  }
  return out;
}

}  // namespace

TEST_CASE("a tree with no removable nodes yields no trials")
{
  SyntaxTree t = parse(mini_c(), "");
  CompositeOracle oracle([](const SyntaxTree&) { return true; });
  ReduceResult r = reduce_baseline(t, oracle);
  CHECK(r.trials.empty());
  CHECK(r.oracle_queries == 0);
  CHECK(r.tokens_final == 0);
}

TEST_CASE("an oracle rejecting the input is a hard error")
{
  SyntaxTree t = parse(mini_c(), "int main ( ) { return 0 ; }");
  CompositeOracle never([](const SyntaxTree&) { return false; });
  CHECK_THROWS_AS(reduce_baseline(t, never), OracleError);

  CallbackModel yes([](const SyntaxTree&, NodeId) { return true; });
  CHECK_THROWS_AS(reduce_guided(t, never, yes, FeatureMode::Type),
                  OracleError);
  CHECK_THROWS_AS(reduce_study(t, never, yes, FeatureMode::Type),
                  OracleError);
}

TEST_CASE("a permissive oracle removes every reachable node")
{
  SyntaxTree t = parse(mini_c(), test_helpers::kListing1);
  CompositeOracle always([](const SyntaxTree&) { return true; },
                         [](const SyntaxTree&) {
                           return std::vector<SemanticIssue>{};
                         });
  ReduceResult r = reduce_baseline(t, always);
  CHECK(r.tokens_final == 0);
  for (const auto& rec : r.trials) {
    CHECK(rec.executed);
    REQUIRE(rec.outcome);
    CHECK(rec.outcome->kind == OracleOutcome::Kind::Passed);
  }
}

TEST_CASE("baseline keeps the property and every accepted step passes")
{
  SyntaxTree t = parse(mini_c(), test_helpers::kListing1);
  CompositeOracle oracle(keep_text("printf"));
  ReduceResult r = reduce_baseline(t, oracle);

  CHECK(r.tokens_final < r.tokens_initial);
  CHECK(oracle.run(r.tree).passed());
  const auto& toks = r.tree.tokens();
  CHECK(std::find(toks.begin(), toks.end(), "printf") != toks.end());

  // Token counts are consistent and non-increasing across accepted steps.
  int current = r.tokens_initial;
  for (const auto& rec : r.trials) {
    CHECK(rec.tokens_before == current);
    REQUIRE(rec.outcome);
    if (rec.outcome->passed()) {
      CHECK(rec.tokens_after < rec.tokens_before);
      current = rec.tokens_after;
    } else {
      CHECK(rec.tokens_after == rec.tokens_before);
    }
  }
  CHECK(current == r.tokens_final);
}

namespace {

/**
 * Expected trial order when every removal fails: the tree never changes, so
 * the whole run is one heap drain with frontier expansion after each pop.
 */
std::vector<NodeId> replay_all_fail(const SyntaxTree& t)
{
  auto before = [&](NodeId a, NodeId b) {
    const Node& na = t.node(a);
    const Node& nb = t.node(b);
    if (na.weight() != nb.weight()) return na.weight() > nb.weight();
    if (na.span_begin != nb.span_begin) return na.span_begin < nb.span_begin;
    return a < b;
  };
  std::vector<NodeId> queue = removable_frontier(t, {t.root()});
  std::vector<NodeId> order;
  while (!queue.empty()) {
    auto it = std::min_element(queue.begin(), queue.end(), before);
    NodeId next = *it;
    queue.erase(it);
    order.push_back(next);
    auto expansion = removable_frontier(t, t.node(next).children);
    queue.insert(queue.end(), expansion.begin(), expansion.end());
  }
  return order;
}

}  // namespace

TEST_CASE("trial order is weight-major heap order when nothing shrinks")
{
  // Freezing the exact text makes every removal fail, which exposes the
  // queue discipline: weight desc, position asc, id asc.
  SyntaxTree tiny = parse(mini_c(), "int main ( ) { return 0 ; }");
  std::string tiny_text = print(tiny);
  CompositeOracle freeze_tiny(
      [tiny_text](const SyntaxTree& t) { return print(t) == tiny_text; });
  ReduceResult r = reduce_baseline(tiny, freeze_tiny);

  std::vector<NodeId> expected = {the_node(tiny, "function_definition"),
                                  the_node(tiny, "jump_statement"),
                                  the_node(tiny, "expression")};
  REQUIRE(r.trials.size() == expected.size());
  for (size_t i = 0; i < expected.size(); ++i) {
    CHECK(r.trials[i].node == expected[i]);
    CHECK(r.trials[i].outcome->kind == OracleOutcome::Kind::NonSemanticFail);
  }
  CHECK(r.tokens_final == r.tokens_initial);

  for (uint64_t seed : {91ull, 92ull, 93ull}) {
    SyntaxTree t = parse(mini_c(), generate_program(seed));
    std::string text = print(t);
    CompositeOracle freeze(
        [text](const SyntaxTree& u) { return print(u) == text; });
    ReduceResult run = reduce_baseline(t, freeze);
    std::vector<NodeId> got;
    for (const auto& rec : run.trials) got.push_back(rec.node);
    CHECK(got == replay_all_fail(t));
  }
}

TEST_CASE("an always-true model reproduces the baseline exactly")
{
  for (uint64_t seed : {21ull, 22ull, 23ull}) {
    std::string src = generate_program(seed);
    SyntaxTree t = parse(mini_c(), src);
    std::string token = t.tokens()[seed % t.tokens().size()];

    CompositeOracle oracle_a(keep_text(token));
    ReduceResult base = reduce_baseline(t, oracle_a);

    CallbackModel yes([](const SyntaxTree&, NodeId) { return true; });
    CompositeOracle oracle_b(keep_text(token));
    ReduceResult guided = reduce_guided(t, oracle_b, yes, FeatureMode::Type);

    CHECK(keys(base.trials) == keys(guided.trials));
    CHECK(print(base.tree) == print(guided.tree));
    CHECK(guided.skipped == 0);
    CHECK(guided.oracle_queries == base.oracle_queries);
  }
}

TEST_CASE("a ground-truth model skips exactly the semantic failures")
{
  for (uint64_t seed : {31ull, 32ull, 33ull}) {
    std::string src = generate_program(seed);
    SyntaxTree t = parse(mini_c(), src);
    std::string token = t.tokens()[(seed * 7) % t.tokens().size()];

    CompositeOracle oracle_a(keep_text(token));
    ReduceResult base = reduce_baseline(t, oracle_a);
    long base_semantic_fails = 0;
    for (const auto& rec : base.trials) {
      if (rec.outcome->kind == OracleOutcome::Kind::SemanticFail) {
        ++base_semantic_fails;
      }
    }

    CallbackModel truth([](const SyntaxTree& tree, NodeId n) {
      return is_valid(remove_node(tree, n));
    });
    CompositeOracle oracle_b(keep_text(token));
    ReduceResult guided = reduce_guided(t, oracle_b, truth, FeatureMode::Type);

    CHECK(print(guided.tree) == print(base.tree));
    CHECK(guided.oracle_queries
          == base.oracle_queries - base_semantic_fails);
    CHECK(guided.skipped == base_semantic_fails);
    CHECK(guided.trials.size() == base.trials.size());
  }
}

TEST_CASE("query accounting matches predictions exactly")
{
  for (uint64_t seed : {41ull, 42ull, 43ull, 44ull}) {
    SyntaxTree t = parse(mini_c(), generate_program(seed));
    std::string token = t.tokens()[(seed * 13) % t.tokens().size()];

    auto rng = std::make_shared<std::mt19937_64>(seed);
    CallbackModel coin([rng](const SyntaxTree&, NodeId) {
      return ((*rng)() & 1) == 0;
    });
    CompositeOracle oracle(keep_text(token));
    ReduceResult r = reduce_guided(t, oracle, coin, FeatureMode::Type);

    long pred_true = 0;
    long pred_false = 0;
    for (const auto& rec : r.trials) {
      REQUIRE(rec.prediction.has_value());
      REQUIRE(rec.features.has_value());
      if (*rec.prediction) {
        ++pred_true;
        CHECK(rec.executed);
        CHECK(rec.outcome.has_value());
      } else {
        ++pred_false;
        CHECK_FALSE(rec.executed);
        CHECK_FALSE(rec.outcome.has_value());
      }
    }
    CHECK(r.oracle_queries == pred_true);
    CHECK(r.skipped == pred_false);
    CHECK(static_cast<long>(r.trials.size()) == pred_true + pred_false);
  }
}

TEST_CASE("study mode queries the oracle on every trial")
{
  SyntaxTree t = parse(mini_c(), generate_program(55));
  std::string token = t.tokens()[5];

  CompositeOracle oracle_a(keep_text(token));
  ReduceResult base = reduce_baseline(t, oracle_a);

  // Even an always-false model must not change study-mode reduction.
  CallbackModel no([](const SyntaxTree&, NodeId) { return false; });
  CompositeOracle oracle_b(keep_text(token));
  ReduceResult study = reduce_study(t, oracle_b, no, FeatureMode::Type);

  CHECK(print(study.tree) == print(base.tree));
  CHECK(keys(study.trials) == keys(base.trials));
  for (const auto& rec : study.trials) {
    CHECK(rec.executed);
    REQUIRE(rec.prediction.has_value());
    CHECK_FALSE(*rec.prediction);
    REQUIRE(rec.outcome.has_value());
  }
  CHECK(study.skipped == 0);
}

TEST_CASE("guided mode requires a matching feature mode")
{
  SyntaxTree t = parse(mini_c(), "int main ( ) { return 0 ; }");
  std::vector<TrainingRow> data = {{{FeatureMode::Type, {1}}, true},
                                   {{FeatureMode::Type, {2}}, false}};
  Forest f = train(data, {}, mini_c().hash());
  ForestModel m(f);
  CompositeOracle oracle([](const SyntaxTree&) { return true; });
  CHECK_THROWS_AS(reduce_guided(t, oracle, m, FeatureMode::Children),
                  ModelError);
}

TEST_CASE("a sibling demoted while queued is not a trial")
{
  SyntaxTree t = parse(mini_c(),
                       "struct S { int a ; int b ; } ; "
                       "int main ( ) { struct S s ; return 0 ; }");
  auto members = nodes_of_rule(t, "member_declaration");
  REQUIRE(members.size() == 2);

  CompositeOracle oracle(keep_text("s"));
  ReduceResult r = reduce_baseline(t, oracle);

  // The struct definition cannot go while "struct S s;" survives, so the
  // loop descends to the members; removing one demotes the other.
  int member_trials = 0;
  for (const auto& rec : r.trials) {
    if (std::find(members.begin(), members.end(), rec.node) != members.end()) {
      ++member_trials;
    }
  }
  CHECK(member_trials == 1);
  CHECK(oracle.run(r.tree).passed());
}

TEST_CASE("multiple passes only shrink the result further")
{
  SyntaxTree t = parse(mini_c(), generate_program(66));
  std::string token = t.tokens()[3];
  CompositeOracle oracle_a(keep_text(token));
  ReduceResult one = reduce_baseline(t, oracle_a, 1);
  CompositeOracle oracle_b(keep_text(token));
  ReduceResult two = reduce_baseline(t, oracle_b, 2);
  CHECK(two.tokens_final <= one.tokens_final);
}

TEST_CASE("trace files round trip")
{
  SyntaxTree t = parse(mini_c(), generate_program(77));
  std::string token = t.tokens()[7];

  auto rng = std::make_shared<std::mt19937_64>(7);
  CallbackModel coin([rng](const SyntaxTree&, NodeId) {
    return ((*rng)() & 1) == 0;
  });
  CompositeOracle oracle(keep_text(token));
  ReduceResult r = reduce_study(t, oracle, coin, FeatureMode::TypeChildren);

  std::string path = "/tmp/semred_test_trace_" + std::to_string(::getpid());
  write_trace(path, r.trials);
  std::vector<TrialRecord> back = read_trace(path);
  CHECK(back == r.trials);
  std::remove(path.c_str());
}

TEST_CASE("trial records serialize optionals faithfully")
{
  TrialRecord skip;
  skip.node = 4;
  skip.features = FeatureVector{FeatureMode::Type, {12}};
  skip.prediction = false;
  skip.executed = false;
  skip.tokens_before = 30;
  skip.tokens_after = 30;
  TrialRecord back = trial_from_json_line(trial_to_json_line(skip));
  CHECK(back == skip);

  TrialRecord bare;
  bare.node = 9;
  bare.executed = true;
  bare.outcome = OracleOutcome{OracleOutcome::Kind::SemanticFail,
                               {{IssueCode::UndeclaredIdentifier, "x", 5}},
                               0.25};
  bare.tokens_before = 12;
  bare.tokens_after = 12;
  TrialRecord bare_back = trial_from_json_line(trial_to_json_line(bare));
  CHECK(bare_back.node == bare.node);
  CHECK(bare_back.outcome->issues == bare.outcome->issues);
  CHECK_FALSE(bare_back.features.has_value());
  CHECK_FALSE(bare_back.prediction.has_value());
}
