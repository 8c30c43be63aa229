#include "semred/syntax_tree.hpp"

#include <algorithm>
#include <deque>
#include <optional>

#include "json.hpp"
#include "semred/errors.hpp"
#include "semred/lexer.hpp"

namespace semred {

namespace {

/** Candidate node built during backtracking; rule == -1 marks a terminal. */
struct Proto
{
  int rule = -1;
  Quantifier quant = Quantifier::One;
  int slot = -1;
  int tok_begin = 0;
  int tok_end = 0;
  std::vector<Proto> children;
};

class Parser
{
 public:
  Parser(const Grammar& g, const std::vector<Token>& toks)
      : g_(g), toks_(toks)
  {
  }

  Proto run()
  {
    auto m = match_rule(g_.start_rule(), 0);
    int end = m ? m->tok_end : -1;
    if (!m || end != static_cast<int>(toks_.size())) {
      int at = std::max(furthest_, end);
      std::string what = at < static_cast<int>(toks_.size())
                             ? "unexpected token '" + toks_[at].text + "'"
                             : "unexpected end of input";
      throw ParseError("parse error at token " + std::to_string(at) + ": "
                           + what,
                       at);
    }
    return std::move(*m);
  }

 private:
  bool terminal_matches(const Symbol& sym, const Token& tok) const
  {
    if (sym.kind == SymbolKind::Lit) {
      return tok.text == sym.text;
    }
    if (sym.text == "id") {
      return tok.kind == TokenKind::Identifier
             && !g_.keywords().count(tok.text);
    }
    if (sym.text == "num") {
      return tok.kind == TokenKind::Number;
    }
    return tok.kind == TokenKind::String;
  }

  /** One instance of a symbol; quant/slot are filled in by the caller. */
  std::optional<Proto> match_once(const Symbol& sym, int pos)
  {
    if (sym.kind == SymbolKind::Ref) {
      auto m = match_rule(sym.rule, pos);
      if (m && g_.rule(sym.rule).transparent) {
        // A transparent rule wraps exactly one child; splice it in.
        Proto inner = std::move(m->children.front());
        return inner;
      }
      return m;
    }
    if (pos >= static_cast<int>(toks_.size())
        || !terminal_matches(sym, toks_[pos])) {
      furthest_ = std::max(furthest_, pos);
      return std::nullopt;
    }
    Proto leaf;
    leaf.rule = -1;
    leaf.tok_begin = pos;
    leaf.tok_end = pos + 1;
    return leaf;
  }

  bool match_alt(const std::vector<Symbol>& alt, int pos,
                 std::vector<Proto>& out, int& end)
  {
    for (size_t si = 0; si < alt.size(); ++si) {
      const Symbol& sym = alt[si];
      auto accept = [&](Proto&& p) {
        p.quant = sym.quant;
        p.slot = static_cast<int>(si);
        pos = p.tok_end;
        out.push_back(std::move(p));
      };
      switch (sym.quant) {
        case Quantifier::One: {
          auto m = match_once(sym, pos);
          if (!m) return false;
          accept(std::move(*m));
          break;
        }
        case Quantifier::Opt: {
          auto m = match_once(sym, pos);
          if (m) accept(std::move(*m));
          break;
        }
        case Quantifier::Star:
        case Quantifier::Plus: {
          int matched = 0;
          while (true) {
            auto m = match_once(sym, pos);
            if (!m) break;
            bool zero_width = m->tok_end == pos;
            accept(std::move(*m));
            ++matched;
            if (zero_width) break;  // guard against non-consuming loops
          }
          if (sym.quant == Quantifier::Plus && matched == 0) return false;
          break;
        }
      }
    }
    end = pos;
    return true;
  }

  std::optional<Proto> match_rule(int rule_id, int pos)
  {
    const RuleDef& rule = g_.rule(rule_id);
    for (const auto& alt : rule.alts) {
      std::vector<Proto> children;
      int end = pos;
      if (match_alt(alt, pos, children, end)) {
        Proto p;
        p.rule = rule_id;
        p.tok_begin = pos;
        p.tok_end = end;
        p.children = std::move(children);
        return p;
      }
    }
    return std::nullopt;
  }

  const Grammar& g_;
  const std::vector<Token>& toks_;
  int furthest_ = 0;
};

NodeId materialize(SyntaxTree& t, const Proto& p, NodeId parent)
{
  NodeId id = static_cast<NodeId>(t.store().size());
  Node n;
  n.id = id;
  n.rule = p.rule < 0 ? t.grammar().terminal_id() : p.rule;
  n.span_begin = p.tok_begin;
  n.span_end = p.tok_end;
  n.parent = parent;
  n.quant = p.quant;
  n.slot = p.slot;
  t.store().push_back(std::move(n));
  for (const Proto& c : p.children) {
    NodeId cid = materialize(t, c, id);
    t.store()[id].children.push_back(cid);
  }
  return id;
}

/** Initial removable flags: opt/star always, plus while the slot group has
 *  more than one member. */
void mark_removable(SyntaxTree& t)
{
  for (Node& n : t.store()) {
    if (n.parent < 0 || n.rule == t.grammar().terminal_id()) {
      n.removable = false;
      continue;
    }
    switch (n.quant) {
      case Quantifier::Opt:
      case Quantifier::Star: n.removable = true; break;
      case Quantifier::Plus: {
        int group = 0;
        for (NodeId sib : t.store()[n.parent].children) {
          if (t.store()[sib].slot == n.slot) ++group;
        }
        n.removable = group >= 2;
        break;
      }
      case Quantifier::One: n.removable = false; break;
    }
  }
}

}  // namespace

const Node& SyntaxTree::node(NodeId id) const
{
  if (!contains(id)) {
    throw NodeError("unknown or removed node " + std::to_string(id));
  }
  return nodes_[id];
}

bool SyntaxTree::has_token_id(int stable_id) const
{
  return std::find(token_ids_.begin(), token_ids_.end(), stable_id)
         != token_ids_.end();
}

const std::string& SyntaxTree::terminal_text(NodeId id) const
{
  const Node& n = node(id);
  if (n.rule != grammar_->terminal_id() || n.weight() != 1) {
    throw NodeError("node " + std::to_string(id) + " is not a terminal");
  }
  return tokens_[n.span_begin];
}

std::vector<NodeId> SyntaxTree::live_nodes() const
{
  std::vector<NodeId> out;
  for (const Node& n : nodes_) {
    if (n.alive) out.push_back(n.id);
  }
  return out;
}

SyntaxTree parse(const Grammar& g, const std::string& source)
{
  std::vector<Token> toks = lex(source);
  Parser parser(g, toks);
  Proto root = parser.run();

  SyntaxTree t(g);
  for (int i = 0; i < static_cast<int>(toks.size()); ++i) {
    t.token_store().push_back(toks[i].text);
    t.token_id_store().push_back(i);
  }
  t.set_root(materialize(t, root, -1));
  mark_removable(t);
  return t;
}

SyntaxTree remove_node(const SyntaxTree& t, NodeId id)
{
  const Node& victim = t.node(id);  // throws for unknown/dead ids
  if (!victim.removable) {
    throw NodeError("node " + std::to_string(id) + " is not removable");
  }

  SyntaxTree u = t;
  auto& nodes = u.store();

  std::vector<NodeId> stack = {id};
  while (!stack.empty()) {
    NodeId k = stack.back();
    stack.pop_back();
    nodes[k].alive = false;
    for (NodeId c : nodes[k].children) stack.push_back(c);
  }

  auto& siblings = nodes[victim.parent].children;
  siblings.erase(std::find(siblings.begin(), siblings.end(), id));

  const int a = victim.span_begin, b = victim.span_end, len = b - a;
  auto& toks = u.token_store();
  auto& tids = u.token_id_store();
  toks.erase(toks.begin() + a, toks.begin() + b);
  tids.erase(tids.begin() + a, tids.begin() + b);
  for (Node& n : nodes) {
    if (!n.alive) continue;
    if (n.span_begin >= b) n.span_begin -= len;
    if (n.span_end >= b) n.span_end -= len;
  }

  if (victim.quant == Quantifier::Plus) {
    NodeId last = -1;
    int group = 0;
    for (NodeId sib : nodes[victim.parent].children) {
      if (nodes[sib].slot == victim.slot) {
        ++group;
        last = sib;
      }
    }
    if (group == 1) nodes[last].removable = false;
  }
  return u;
}

std::vector<NodeId> removable_frontier(const SyntaxTree& t,
                                       const std::vector<NodeId>& start)
{
  std::deque<NodeId> queue(start.begin(), start.end());
  std::vector<NodeId> out;
  while (!queue.empty()) {
    NodeId id = queue.front();
    queue.pop_front();
    const Node& n = t.node(id);
    if (n.removable) {
      out.push_back(id);
    } else {
      for (NodeId c : n.children) queue.push_back(c);
    }
  }
  return out;
}

std::string print(const SyntaxTree& t)
{
  std::string out;
  for (const std::string& tok : t.tokens()) {
    out += tok;
    if (tok == ";" || tok == "{" || tok == "}") {
      out += '\n';
    } else {
      out += ' ';
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  if (!out.empty() && out.back() != '\n') out += '\n';
  return out;
}

std::string tree_to_json(const SyntaxTree& t)
{
  nlohmann::json doc;
  doc["tokens"] = t.tokens();
  nlohmann::json nodes = nlohmann::json::array();
  for (NodeId id : t.live_nodes()) {
    const Node& n = t.node(id);
    nlohmann::json jn;
    jn["id"] = n.id;
    jn["rule"] = n.rule;
    jn["span"] = {n.span_begin, n.span_end};
    jn["children"] = n.children;
    jn["removable"] = n.removable;
    jn["quant"] = quantifier_name(n.quant);
    jn["slot"] = n.slot;
    nodes.push_back(std::move(jn));
  }
  doc["nodes"] = std::move(nodes);
  doc["root"] = t.root();
  return doc.dump();
}

SyntaxTree tree_from_json(const Grammar& g, const std::string& json_text)
{
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw NodeError(std::string("tree is not valid JSON: ") + e.what());
  }

  try {
  SyntaxTree t(g);
  for (const auto& tok : doc.at("tokens")) {
    t.token_store().push_back(tok.get<std::string>());
  }
  for (int i = 0; i < t.token_count(); ++i) {
    t.token_id_store().push_back(i);
  }

  NodeId max_id = -1;
  for (const auto& jn : doc.at("nodes")) {
    max_id = std::max(max_id, jn.at("id").get<NodeId>());
  }
  t.store().resize(max_id + 1);
  for (Node& n : t.store()) n.alive = false;

  for (const auto& jn : doc.at("nodes")) {
    NodeId id = jn.at("id").get<NodeId>();
    Node& n = t.store()[id];
    n.id = id;
    n.rule = jn.at("rule").get<int>();
    if (n.rule < 0 || n.rule > g.terminal_id()) {
      throw NodeError("node " + std::to_string(id) + ": rule id "
                      + std::to_string(n.rule) + " out of range");
    }
    n.span_begin = jn.at("span").at(0).get<int>();
    n.span_end = jn.at("span").at(1).get<int>();
    if (n.span_begin < 0 || n.span_end < n.span_begin
        || n.span_end > t.token_count()) {
      throw NodeError("node " + std::to_string(id) + ": bad span");
    }
    n.children = jn.at("children").get<std::vector<NodeId>>();
    n.removable = jn.at("removable").get<bool>();
    if (jn.contains("quant")) {
      n.quant = quantifier_from_name(jn.at("quant").get<std::string>());
    }
    if (jn.contains("slot")) n.slot = jn.at("slot").get<int>();
    n.alive = true;
  }

  NodeId root = doc.at("root").get<NodeId>();
  if (!t.contains(root)) {
    throw NodeError("tree root " + std::to_string(root) + " missing");
  }
  t.set_root(root);
  for (NodeId id : t.live_nodes()) {
    for (NodeId c : t.node(id).children) {
      if (!t.contains(c)) {
        throw NodeError("node " + std::to_string(id) + ": dead child "
                        + std::to_string(c));
      }
      t.store()[c].parent = id;
    }
  }
  t.store()[root].parent = -1;
  return t;
  } catch (const nlohmann::json::exception& e) {
    throw NodeError(std::string("malformed tree JSON: ") + e.what());
  }
}

}  // namespace semred
