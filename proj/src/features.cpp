#include "semred/features.hpp"

#include "semred/errors.hpp"

namespace semred {

const char* feature_mode_name(FeatureMode mode)
{
  switch (mode) {
    case FeatureMode::Type: return "type";
    case FeatureMode::Children: return "children";
    case FeatureMode::Path: return "path";
    case FeatureMode::TypeChildren: return "type+children";
    case FeatureMode::TypeChildrenPath: return "type+children+path";
  }
  return "type";
}

FeatureMode feature_mode_from_name(const std::string& name)
{
  if (name == "type") return FeatureMode::Type;
  if (name == "children") return FeatureMode::Children;
  if (name == "path") return FeatureMode::Path;
  if (name == "type+children") return FeatureMode::TypeChildren;
  if (name == "type+children+path") return FeatureMode::TypeChildrenPath;
  throw Error("unknown feature mode '" + name + "'");
}

int feature_length(FeatureMode mode, int rule_count)
{
  switch (mode) {
    case FeatureMode::Type: return 1;
    case FeatureMode::Children: return rule_count + 1;
    case FeatureMode::Path: return rule_count;
    case FeatureMode::TypeChildren: return rule_count + 2;
    case FeatureMode::TypeChildrenPath: return 2 * rule_count + 2;
  }
  return 1;
}

namespace {

void append_children_bits(const SyntaxTree& t, const Node& n,
                          std::vector<int>& out)
{
  const int R = t.grammar().rule_count();
  std::vector<int> bits(R + 1, 0);
  for (NodeId c : n.children) {
    bits[t.node(c).rule] = 1;  // terminals land on index R
  }
  out.insert(out.end(), bits.begin(), bits.end());
}

void append_path_bits(const SyntaxTree& t, const Node& n,
                      std::vector<int>& out)
{
  const int R = t.grammar().rule_count();
  std::vector<int> bits(R, 0);
  for (NodeId at = n.id; at >= 0; at = t.node(at).parent) {
    bits[t.node(at).rule] = 1;
  }
  out.insert(out.end(), bits.begin(), bits.end());
}

}  // namespace

FeatureVector extract(const SyntaxTree& t, NodeId n, FeatureMode mode)
{
  const Node& node = t.node(n);  // throws for unknown/dead nodes
  if (node.rule == t.grammar().terminal_id()) {
    throw NodeError("node " + std::to_string(n)
                    + " is a terminal; features are defined on rule nodes");
  }

  FeatureVector fv;
  fv.mode = mode;
  switch (mode) {
    case FeatureMode::Type: fv.values.push_back(node.rule); break;
    case FeatureMode::Children: append_children_bits(t, node, fv.values); break;
    case FeatureMode::Path: append_path_bits(t, node, fv.values); break;
    case FeatureMode::TypeChildren:
      fv.values.push_back(node.rule);
      append_children_bits(t, node, fv.values);
      break;
    case FeatureMode::TypeChildrenPath:
      fv.values.push_back(node.rule);
      append_children_bits(t, node, fv.values);
      append_path_bits(t, node, fv.values);
      break;
  }
  return fv;
}

}  // namespace semred
