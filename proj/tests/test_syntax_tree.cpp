#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "semred/datagen.hpp"
#include "semred/errors.hpp"
#include "semred/syntax_tree.hpp"

using namespace semred;
using test_helpers::mini_c;
using test_helpers::nodes_of_rule;
using test_helpers::the_node;

namespace {

/** Every live node's children partition its span in order; terminals span
    one token; the root spans everything. */
void check_span_invariants(const SyntaxTree& t)
{
  if (t.root() == -1) return;
  const Node& root = t.node(t.root());
  CHECK(root.span_begin == 0);
  CHECK(root.span_end == t.token_count());
  for (NodeId id : t.live_nodes()) {
    const Node& n = t.node(id);
    CHECK(n.span_begin <= n.span_end);
    if (n.rule == t.grammar().terminal_id()) {
      CHECK(n.weight() == 1);
      CHECK(n.children.empty());
      continue;
    }
    int cursor = n.span_begin;
    for (NodeId c : n.children) {
      const Node& child = t.node(c);
      CHECK(child.parent == id);
      CHECK(child.span_begin == cursor);
      cursor = child.span_end;
    }
    CHECK(cursor == n.span_end);
  }
}

}  // namespace

TEST_CASE("nine-token program parses with the expected removable set")
{
  SyntaxTree t = parse(mini_c(), "int main() { return 0; }");
  REQUIRE(t.token_count() == 9);
  CHECK(t.tokens() == std::vector<std::string>{"int", "main", "(", ")", "{",
                                               "return", "0", ";", "}"});

  std::set<std::string> removable;
  for (NodeId id : t.live_nodes()) {
    const Node& n = t.node(id);
    if (n.removable) removable.insert(t.grammar().rule_name(n.rule));
  }
  CHECK(removable == std::set<std::string>{"function_definition",
                                           "jump_statement", "expression"});
  check_span_invariants(t);
}

TEST_CASE("empty program parses to a bare root")
{
  SyntaxTree t = parse(mini_c(), "");
  CHECK(t.token_count() == 0);
  for (NodeId id : t.live_nodes()) CHECK_FALSE(t.node(id).removable);
  check_span_invariants(t);
}

TEST_CASE("transparent rules splice their child into the parent")
{
  SyntaxTree t = parse(mini_c(), test_helpers::kListing1);
  const Node& root = t.node(t.root());
  REQUIRE(root.children.size() == 2);
  CHECK(t.grammar().rule_name(t.node(root.children[0]).rule)
        == "external_declaration");
  CHECK(t.grammar().rule_name(t.node(root.children[1]).rule)
        == "function_definition");
  for (NodeId c : root.children) {
    CHECK(t.node(c).quant == Quantifier::Star);
    CHECK(t.node(c).removable);
  }
  // The statements sit under block_item, one node per statement.
  NodeId item = the_node(t, "block_item");
  std::vector<std::string> kids;
  for (NodeId c : t.node(item).children) {
    kids.push_back(t.grammar().rule_name(t.node(c).rule));
  }
  CHECK(kids == std::vector<std::string>{"declaration", "assignment_expression",
                                         "expression_statement",
                                         "jump_statement"});
  check_span_invariants(t);
}

TEST_CASE("removing a node erases its tokens and shifts spans")
{
  SyntaxTree t = parse(mini_c(), "int main() { return 0; }");
  NodeId expr = the_node(t, "expression");
  int before = t.token_count();
  SyntaxTree r = remove_node(t, expr);
  CHECK(r.token_count() == before - 1);
  CHECK(r.tokens() == std::vector<std::string>{"int", "main", "(", ")", "{",
                                               "return", ";", "}"});
  CHECK_FALSE(r.contains(expr));
  check_span_invariants(r);
  // The original tree is untouched.
  CHECK(t.token_count() == before);
  CHECK(t.contains(expr));
}

TEST_CASE("token identities are stable across removals")
{
  SyntaxTree t = parse(mini_c(), "int main() { return 0; }");
  std::vector<int> ids = t.token_ids();
  NodeId expr = the_node(t, "expression");
  int zero_id = ids[6];  // token "0"
  SyntaxTree r = remove_node(t, expr);
  CHECK_FALSE(r.has_token_id(zero_id));
  std::vector<int> expect = ids;
  expect.erase(expect.begin() + 6);
  CHECK(r.token_ids() == expect);
}

TEST_CASE("only live removable nodes may be removed")
{
  SyntaxTree t = parse(mini_c(), "int main() { return 0; }");
  NodeId compound = the_node(t, "compound_statement");
  CHECK_THROWS_AS(remove_node(t, compound), NodeError);
  CHECK_THROWS_AS(remove_node(t, 9999), NodeError);

  NodeId jump = the_node(t, "jump_statement");
  SyntaxTree r = remove_node(t, jump);
  CHECK_THROWS_AS(remove_node(r, jump), NodeError);
  CHECK_THROWS_AS(r.node(jump), NodeError);
}

TEST_CASE("plus quantifier demotes the last sibling")
{
  SyntaxTree t = parse(mini_c(), "struct S { int a; int b; };");
  auto members = nodes_of_rule(t, "member_declaration");
  REQUIRE(members.size() == 2);
  CHECK(t.node(members[0]).removable);
  CHECK(t.node(members[1]).removable);

  SyntaxTree r = remove_node(t, members[0]);
  CHECK_FALSE(r.node(members[1]).removable);
  CHECK_THROWS_AS(remove_node(r, members[1]), NodeError);
  check_span_invariants(r);
}

TEST_CASE("removable_frontier stops at the nearest removable descendants")
{
  SyntaxTree t = parse(mini_c(), test_helpers::kListing1);
  auto frontier = removable_frontier(t, {t.root()});
  std::vector<std::string> names;
  for (NodeId id : frontier) names.push_back(t.grammar().rule_name(t.node(id).rule));
  CHECK(names == std::vector<std::string>{"external_declaration",
                                          "function_definition"});

  // Descending through a removable node's children reaches the next layer.
  NodeId fn = the_node(t, "function_definition");
  auto below = removable_frontier(t, t.node(fn).children);
  std::set<std::string> below_names;
  for (NodeId id : below) {
    below_names.insert(t.grammar().rule_name(t.node(id).rule));
    CHECK(t.node(id).removable);
  }
  CHECK(below_names == std::set<std::string>{"declaration",
                                             "assignment_expression",
                                             "expression_statement",
                                             "jump_statement"});
  CHECK_THROWS_AS(removable_frontier(t, {12345}), NodeError);
}

TEST_CASE("frontier results are an antichain")
{
  SyntaxTree t = parse(mini_c(), test_helpers::kListing1);
  auto frontier = removable_frontier(t, {t.root()});
  for (NodeId a : frontier) {
    for (NodeId b : frontier) {
      if (a == b) continue;
      const Node& na = t.node(a);
      const Node& nb = t.node(b);
      bool nested = na.span_begin <= nb.span_begin && nb.span_end <= na.span_end;
      CHECK_FALSE(nested);
    }
  }
}

TEST_CASE("print renders tokens with statement-friendly line breaks")
{
  SyntaxTree t = parse(mini_c(), "int main() { return 0; }");
  CHECK(print(t) == "int main ( ) {\nreturn 0 ;\n}\n");

  SyntaxTree empty = parse(mini_c(), "");
  CHECK(print(empty) == "");
}

TEST_CASE("printed output reparses to the same token stream")
{
  for (uint64_t seed : {1ull, 2ull, 3ull}) {
    std::string src = generate_program(seed);
    SyntaxTree t = parse(mini_c(), src);
    SyntaxTree again = parse(mini_c(), print(t));
    CHECK(again.tokens() == t.tokens());
  }
}

TEST_CASE("parse reports the failing token position")
{
  try {
    parse(mini_c(), "int main() {");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.position >= 4);
  }
  // Trailing garbage is rejected even though a prefix matches.
  CHECK_THROWS_AS(parse(mini_c(), "int x; }"), ParseError);
  CHECK_THROWS_AS(parse(mini_c(), "@"), LexError);
  try {
    parse(mini_c(), "int x;\n  @");
    FAIL("expected LexError");
  } catch (const LexError& e) {
    CHECK(e.line == 2);
    CHECK(e.column == 3);
  }
}

TEST_CASE("tree JSON round trips bit-exactly")
{
  SyntaxTree t = parse(mini_c(), test_helpers::kListing1);
  std::string j1 = tree_to_json(t);
  SyntaxTree back = tree_from_json(mini_c(), j1);
  CHECK(tree_to_json(back) == j1);
  CHECK(back.tokens() == t.tokens());
  check_span_invariants(back);

  // Round trip survives removals.
  NodeId jump = the_node(t, "jump_statement");
  SyntaxTree r = remove_node(t, jump);
  std::string j2 = tree_to_json(r);
  CHECK(tree_to_json(tree_from_json(mini_c(), j2)) == j2);
}

TEST_CASE("tree JSON validation rejects corrupt input")
{
  CHECK_THROWS_AS(tree_from_json(mini_c(), "{}"), Error);
  CHECK_THROWS_AS(tree_from_json(mini_c(), "not json"), Error);
  SyntaxTree t = parse(mini_c(), "int main() { return 0; }");
  std::string good = tree_to_json(t);
  std::string bad_rule = good;
  // Rule ids beyond the grammar are invalid.
  size_t pos = bad_rule.find("\"rule\":");
  REQUIRE(pos != std::string::npos);
  bad_rule.replace(pos, 9, "\"rule\":999");
  CHECK_THROWS_AS(tree_from_json(mini_c(), bad_rule), Error);
}

TEST_CASE("span invariants hold across random removal sequences")
{
  std::mt19937_64 rng(42);
  for (uint64_t seed = 10; seed < 16; ++seed) {
    SyntaxTree t = parse(mini_c(), generate_program(seed));
    for (int step = 0; step < 12; ++step) {
      std::vector<NodeId> removable;
      for (NodeId id : t.live_nodes()) {
        if (t.node(id).removable) removable.push_back(id);
      }
      if (removable.empty()) break;
      NodeId victim = removable[rng() % removable.size()];
      int expect = t.token_count() - t.node(victim).weight();
      t = remove_node(t, victim);
      CHECK(t.token_count() == expect);
      check_span_invariants(t);
    }
  }
}
