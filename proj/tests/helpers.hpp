#pragma once

#include <string>
#include <vector>

#include "semred/grammar.hpp"
#include "semred/syntax_tree.hpp"

namespace test_helpers {

inline std::string data_path(const std::string& name)
{
  return std::string(SEMRED_DATA_DIR) + "/" + name;
}

inline const semred::Grammar& mini_c()
{
  static semred::Grammar g = semred::load_grammar(data_path("mini_c.json"));
  return g;
}

inline const char* kListing1 = R"(struct S {
 int member;
};
int main() {
 struct S s1;
 s1.member = 1;
 printf("Hello World!\n");
 return 0;
}
)";

/** Live nodes of the given rule, in id order. */
inline std::vector<semred::NodeId> nodes_of_rule(const semred::SyntaxTree& t,
                                                 const std::string& rule)
{
  int id = t.grammar().rule_id(rule);
  std::vector<semred::NodeId> out;
  for (semred::NodeId n : t.live_nodes()) {
    if (t.node(n).rule == id) out.push_back(n);
  }
  return out;
}

// The assertion-backed helpers are only available inside doctest binaries.
#ifdef DOCTEST_LIBRARY_INCLUDED

/** Sole live node of the given rule; fails the test when absent/ambiguous. */
inline semred::NodeId the_node(const semred::SyntaxTree& t,
                               const std::string& rule)
{
  auto all = nodes_of_rule(t, rule);
  REQUIRE(all.size() == 1);
  return all[0];
}

/** First live node of the given rule whose span covers `token_index`. */
inline semred::NodeId node_covering(const semred::SyntaxTree& t,
                                    const std::string& rule, int token_index)
{
  for (semred::NodeId n : nodes_of_rule(t, rule)) {
    const auto& nd = t.node(n);
    if (nd.span_begin <= token_index && token_index < nd.span_end) return n;
  }
  REQUIRE(false);
  return -1;
}

#endif  // DOCTEST_LIBRARY_INCLUDED

}  // namespace test_helpers
