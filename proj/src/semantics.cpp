#include "semred/semantics.hpp"

#include <algorithm>
#include <cctype>

#include "semred/errors.hpp"

namespace semred {

namespace {

/** Rule ids of the bundled mini-C grammar, resolved once per check. */
struct MiniC
{
  explicit MiniC(const Grammar& g)
      : external_declaration(g.rule_id("external_declaration")),
        struct_specifier(g.rule_id("struct_specifier")),
        member_declaration(g.rule_id("member_declaration")),
        function_definition(g.rule_id("function_definition")),
        parameter_list(g.rule_id("parameter_list")),
        parameter_rest(g.rule_id("parameter_rest")),
        parameter(g.rule_id("parameter")),
        type_specifier(g.rule_id("type_specifier")),
        struct_ref(g.rule_id("struct_ref")),
        compound_statement(g.rule_id("compound_statement")),
        block_item(g.rule_id("block_item")),
        declaration(g.rule_id("declaration")),
        declaration_specifiers(g.rule_id("declaration_specifiers")),
        init_declarator_list(g.rule_id("init_declarator_list")),
        init_declarator_rest(g.rule_id("init_declarator_rest")),
        init_declarator(g.rule_id("init_declarator")),
        initializer(g.rule_id("initializer")),
        assignment_expression(g.rule_id("assignment_expression")),
        expression_statement(g.rule_id("expression_statement")),
        jump_statement(g.rule_id("jump_statement")),
        expression(g.rule_id("expression")),
        binary_rest(g.rule_id("binary_rest")),
        postfix_expression(g.rule_id("postfix_expression")),
        call_suffix(g.rule_id("call_suffix")),
        argument_list(g.rule_id("argument_list")),
        argument_rest(g.rule_id("argument_rest")),
        member_suffix(g.rule_id("member_suffix")),
        primary_expression(g.rule_id("primary_expression")),
        paren_expression(g.rule_id("paren_expression")),
        terminal(g.terminal_id())
  {
  }

  int external_declaration, struct_specifier, member_declaration,
      function_definition, parameter_list, parameter_rest, parameter,
      type_specifier, struct_ref, compound_statement, block_item, declaration,
      declaration_specifiers, init_declarator_list, init_declarator_rest,
      init_declarator, initializer, assignment_expression,
      expression_statement, jump_statement, expression, binary_rest,
      postfix_expression, call_suffix, argument_list, argument_rest,
      member_suffix, primary_expression, paren_expression, terminal;
};

class Checker
{
 public:
  Checker(const SyntaxTree& t) : t_(t), ids_(t.grammar()) {}

  std::vector<SemanticIssue> run()
  {
    scopes_.push();
    for (NodeId child : t_.node(t_.root()).children) {
      const Node& n = t_.node(child);
      if (n.rule == ids_.external_declaration) {
        check_external(n);
      } else if (n.rule == ids_.function_definition) {
        check_function(n);
      }
    }
    scopes_.pop();
    std::stable_sort(issues_.begin(), issues_.end(),
                     [](const SemanticIssue& a, const SemanticIssue& b) {
                       return a.location < b.location;
                     });
    return std::move(issues_);
  }

 private:
  NodeId find_child(const Node& n, int rule) const
  {
    for (NodeId c : n.children) {
      if (t_.node(c).rule == rule) return c;
    }
    return -1;
  }

  std::vector<NodeId> children_of_rule(const Node& n, int rule) const
  {
    std::vector<NodeId> out;
    for (NodeId c : n.children) {
      if (t_.node(c).rule == rule) out.push_back(c);
    }
    return out;
  }

  void report(IssueCode code, const std::string& subject, int location)
  {
    issues_.push_back({code, subject, location});
  }

  /** struct_ref inside a type use: its tag must be declared. */
  void check_type(const Node& type_spec)
  {
    NodeId ref = find_child(type_spec, ids_.struct_ref);
    if (ref < 0) return;  // "int"
    const Node& r = t_.node(ref);
    NodeId tag = r.children.size() > 1 ? r.children[1] : -1;
    if (tag < 0) return;
    const std::string& name = t_.terminal_text(tag);
    if (!scopes_.tag_declared(name)) {
      report(IssueCode::UndeclaredType, name, t_.node(tag).span_begin);
    }
  }

  void check_external(const Node& ext)
  {
    NodeId spec = find_child(ext, ids_.struct_specifier);
    if (spec >= 0) {
      const Node& s = t_.node(spec);
      // children: "struct" id "{" member+ "}"; terminals are fixed.
      const std::string& tag = t_.terminal_text(s.children[1]);
      scopes_.declare(tag, {NameKind::StructTag, 0});
      for (NodeId m : children_of_rule(s, ids_.member_declaration)) {
        NodeId ts = find_child(t_.node(m), ids_.type_specifier);
        if (ts >= 0) check_type(t_.node(ts));
      }
      return;
    }
    NodeId decl = find_child(ext, ids_.declaration);
    if (decl >= 0) check_declaration(t_.node(decl));
  }

  void check_function(const Node& fn)
  {
    NodeId ts = find_child(fn, ids_.type_specifier);
    if (ts >= 0) check_type(t_.node(ts));
    const std::string& name = t_.terminal_text(fn.children[1]);

    std::vector<NodeId> params;
    NodeId plist = find_child(fn, ids_.parameter_list);
    if (plist >= 0) {
      const Node& pl = t_.node(plist);
      for (NodeId c : pl.children) {
        const Node& cn = t_.node(c);
        if (cn.rule == ids_.parameter) {
          params.push_back(c);
        } else if (cn.rule == ids_.parameter_rest) {
          NodeId p = find_child(cn, ids_.parameter);
          if (p >= 0) params.push_back(p);
        }
      }
    }
    scopes_.declare(name, {NameKind::Function, static_cast<int>(params.size())});

    scopes_.push();
    for (NodeId p : params) {
      const Node& pn = t_.node(p);
      NodeId pts = find_child(pn, ids_.type_specifier);
      if (pts >= 0) check_type(t_.node(pts));
      scopes_.declare(t_.terminal_text(pn.children[1]),
                      {NameKind::Variable, 0});
    }
    NodeId body = find_child(fn, ids_.compound_statement);
    if (body >= 0) {
      NodeId items = find_child(t_.node(body), ids_.block_item);
      if (items >= 0) {
        for (NodeId s : t_.node(items).children) check_statement(t_.node(s));
      }
    }
    scopes_.pop();
  }

  void check_statement(const Node& s)
  {
    if (s.rule == ids_.declaration) {
      check_declaration(s);
    } else if (s.rule == ids_.assignment_expression) {
      check_postfix(t_.node(s.children[0]));
      NodeId rhs = find_child(s, ids_.expression);
      if (rhs >= 0) check_expression(t_.node(rhs));
    } else if (s.rule == ids_.expression_statement
               || s.rule == ids_.jump_statement) {
      NodeId e = find_child(s, ids_.expression);
      if (e >= 0) check_expression(t_.node(e));
    }
  }

  void check_declaration(const Node& d)
  {
    NodeId specs = find_child(d, ids_.declaration_specifiers);
    NodeId list = find_child(d, ids_.init_declarator_list);
    if (specs >= 0) {
      NodeId ts = find_child(t_.node(specs), ids_.type_specifier);
      if (ts >= 0) check_type(t_.node(ts));
    }
    if (list < 0) {
      report(IssueCode::EmptyDeclaration, t_.tokens()[d.span_begin],
             d.span_begin);
      return;
    }

    std::vector<NodeId> declarators;
    const Node& ln = t_.node(list);
    for (NodeId c : ln.children) {
      const Node& cn = t_.node(c);
      if (cn.rule == ids_.init_declarator) {
        declarators.push_back(c);
      } else if (cn.rule == ids_.init_declarator_rest) {
        NodeId inner = find_child(cn, ids_.init_declarator);
        if (inner >= 0) declarators.push_back(inner);
      }
    }
    if (specs < 0 && !declarators.empty()) {
      const Node& first = t_.node(declarators.front());
      report(IssueCode::MissingTypeSpecifier,
             t_.terminal_text(first.children[0]), first.span_begin);
    }
    for (NodeId decl : declarators) {
      const Node& dn = t_.node(decl);
      scopes_.declare(t_.terminal_text(dn.children[0]),
                      {NameKind::Variable, 0});
      NodeId init = find_child(dn, ids_.initializer);
      if (init >= 0) {
        NodeId e = find_child(t_.node(init), ids_.expression);
        if (e >= 0) check_expression(t_.node(e));
      }
    }
  }

  void check_expression(const Node& e)
  {
    for (NodeId c : e.children) {
      const Node& cn = t_.node(c);
      if (cn.rule == ids_.postfix_expression) {
        check_postfix(cn);
      } else if (cn.rule == ids_.binary_rest) {
        check_expression(cn);  // same shape: postfix children
      }
    }
  }

  int count_arguments(const Node& call) const
  {
    NodeId args = find_child(call, ids_.argument_list);
    if (args < 0) return 0;
    int n = 1;
    for (NodeId c : t_.node(args).children) {
      if (t_.node(c).rule == ids_.argument_rest) ++n;
    }
    return n;
  }

  void check_postfix(const Node& post)
  {
    const Node& prim = t_.node(post.children[0]);
    std::vector<NodeId> suffixes(post.children.begin() + 1,
                                 post.children.end());

    NodeId head = prim.children.empty() ? -1 : prim.children[0];
    const Node* head_node = head >= 0 ? &t_.node(head) : nullptr;
    bool head_is_id = head_node && head_node->rule == ids_.terminal
                      && t_.grammar()
                             .keywords()
                             .count(t_.terminal_text(head))
                             == 0
                      && !t_.tokens()[head_node->span_begin].empty()
                      && (std::isalpha(static_cast<unsigned char>(
                              t_.tokens()[head_node->span_begin][0]))
                          || t_.tokens()[head_node->span_begin][0] == '_');

    bool callee_position =
        head_is_id && !suffixes.empty()
        && t_.node(suffixes.front()).rule == ids_.call_suffix;

    if (head_is_id) {
      const std::string& name = t_.terminal_text(head);
      if (callee_position) {
        // Implicit function declarations are accepted; only a known
        // arity can be violated.
        auto info = scopes_.lookup(name);
        if (info && info->kind == NameKind::Function) {
          int given = count_arguments(t_.node(suffixes.front()));
          if (given > info->arity) {
            report(IssueCode::TooManyArguments, name, prim.span_begin);
          }
        }
      } else if (!scopes_.lookup(name)
                 || scopes_.lookup(name)->kind == NameKind::StructTag) {
        report(IssueCode::UndeclaredIdentifier, name, prim.span_begin);
      }
    } else if (head_node && head_node->rule == ids_.paren_expression) {
      NodeId inner = find_child(*head_node, ids_.expression);
      if (inner >= 0) check_expression(t_.node(inner));
    }

    for (NodeId s : suffixes) {
      const Node& sn = t_.node(s);
      if (sn.rule == ids_.call_suffix) {
        NodeId args = find_child(sn, ids_.argument_list);
        if (args >= 0) check_argument_list(t_.node(args));
      }
      // member_suffix: the base check above is all that is required.
    }
  }

  void check_argument_list(const Node& args)
  {
    for (NodeId c : args.children) {
      const Node& cn = t_.node(c);
      if (cn.rule == ids_.expression) {
        check_expression(cn);
      } else if (cn.rule == ids_.argument_rest) {
        NodeId e = find_child(cn, ids_.expression);
        if (e >= 0) check_expression(t_.node(e));
      }
    }
  }

  const SyntaxTree& t_;
  MiniC ids_;
  ScopeTable scopes_;
  std::vector<SemanticIssue> issues_;
};

}  // namespace

const char* issue_code_name(IssueCode code)
{
  switch (code) {
    case IssueCode::UndeclaredIdentifier: return "undeclared_identifier";
    case IssueCode::UndeclaredType: return "undeclared_type";
    case IssueCode::EmptyDeclaration: return "empty_declaration";
    case IssueCode::TooManyArguments: return "too_many_arguments";
    case IssueCode::MissingTypeSpecifier: return "missing_type_specifier";
  }
  return "unknown";
}

IssueCode issue_code_from_name(const std::string& name)
{
  if (name == "undeclared_identifier") return IssueCode::UndeclaredIdentifier;
  if (name == "undeclared_type") return IssueCode::UndeclaredType;
  if (name == "empty_declaration") return IssueCode::EmptyDeclaration;
  if (name == "too_many_arguments") return IssueCode::TooManyArguments;
  if (name == "missing_type_specifier") return IssueCode::MissingTypeSpecifier;
  throw Error("unknown issue code '" + name + "'");
}

void ScopeTable::push()
{
  scopes_.emplace_back();
}

void ScopeTable::pop()
{
  if (scopes_.empty()) {
    throw Error("scope table underflow");
  }
  scopes_.pop_back();
}

void ScopeTable::declare(const std::string& name, NameInfo info)
{
  if (scopes_.empty()) {
    throw Error("declare outside any scope");
  }
  scopes_.back()[name] = info;
}

std::optional<NameInfo> ScopeTable::lookup(const std::string& name) const
{
  for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
    auto found = it->find(name);
    if (found != it->end()) return found->second;
  }
  return std::nullopt;
}

bool ScopeTable::tag_declared(const std::string& name) const
{
  for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
    auto found = it->find(name);
    if (found != it->end() && found->second.kind == NameKind::StructTag) {
      return true;
    }
  }
  return false;
}

std::vector<SemanticIssue> check(const SyntaxTree& t)
{
  return Checker(t).run();
}

bool is_valid(const SyntaxTree& t)
{
  return check(t).empty();
}

}  // namespace semred
