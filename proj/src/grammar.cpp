#include "semred/grammar.hpp"

#include <cctype>

#include "json.hpp"
#include "semred/errors.hpp"
#include "semred/util.hpp"

namespace semred {

namespace {

bool identifier_shaped(const std::string& s)
{
  if (s.empty() || (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_')) {
    return false;
  }
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') {
      return false;
    }
  }
  return true;
}

Symbol parse_symbol(const nlohmann::json& j, const std::string& rule_name)
{
  if (!j.is_object()) {
    throw GrammarError("rule '" + rule_name + "': symbol is not an object");
  }
  Symbol sym;
  int kinds = 0;
  if (j.contains("ref")) {
    sym.kind = SymbolKind::Ref;
    sym.text = j.at("ref").get<std::string>();
    ++kinds;
  }
  if (j.contains("lit")) {
    sym.kind = SymbolKind::Lit;
    sym.text = j.at("lit").get<std::string>();
    ++kinds;
  }
  if (j.contains("class")) {
    sym.kind = SymbolKind::Class;
    sym.text = j.at("class").get<std::string>();
    ++kinds;
  }
  if (kinds != 1) {
    throw GrammarError("rule '" + rule_name
                       + "': symbol needs exactly one of ref/lit/class");
  }
  if (sym.kind == SymbolKind::Class && sym.text != "id" && sym.text != "num"
      && sym.text != "str") {
    throw GrammarError("rule '" + rule_name + "': unknown token class '"
                       + sym.text + "'");
  }
  if (sym.kind == SymbolKind::Lit && sym.text.empty()) {
    throw GrammarError("rule '" + rule_name + "': empty literal");
  }
  if (j.contains("q")) {
    sym.quant = quantifier_from_name(j.at("q").get<std::string>());
  }
  if (sym.kind != SymbolKind::Ref && sym.quant != Quantifier::One) {
    throw GrammarError("rule '" + rule_name
                       + "': quantifier on a terminal symbol '" + sym.text
                       + "' (wrap it in a rule instead)");
  }
  return sym;
}

}  // namespace

const char* quantifier_name(Quantifier q)
{
  switch (q) {
    case Quantifier::One: return "one";
    case Quantifier::Opt: return "opt";
    case Quantifier::Star: return "star";
    case Quantifier::Plus: return "plus";
  }
  return "one";
}

Quantifier quantifier_from_name(const std::string& name)
{
  if (name == "one") return Quantifier::One;
  if (name == "opt") return Quantifier::Opt;
  if (name == "star") return Quantifier::Star;
  if (name == "plus") return Quantifier::Plus;
  throw GrammarError("unknown quantifier '" + name + "'");
}

Grammar Grammar::from_json(const std::string& text)
{
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // e.byte is a 1-based offset into the text; report line/column too.
    size_t pos = e.byte > 0 ? e.byte - 1 : 0;
    int line = 1, col = 1;
    for (size_t i = 0; i < pos && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw GrammarError("grammar is not valid JSON at line "
                       + std::to_string(line) + ", column "
                       + std::to_string(col) + ": " + e.what());
  }

  if (!doc.is_object() || !doc.contains("start") || !doc.contains("rules")) {
    throw GrammarError("grammar needs top-level 'start' and 'rules'");
  }

  Grammar g;
  g.hash_ = to_hex(fnv1a64(text));

  for (const auto& jr : doc.at("rules")) {
    RuleDef rule;
    rule.name = jr.at("name").get<std::string>();
    if (g.ids_.count(rule.name)) {
      throw GrammarError("duplicate rule name '" + rule.name + "'");
    }
    rule.transparent = !rule.name.empty() && rule.name[0] == '_';
    for (const auto& jalt : jr.at("alts")) {
      std::vector<Symbol> alt;
      for (const auto& jsym : jalt) {
        alt.push_back(parse_symbol(jsym, rule.name));
      }
      rule.alts.push_back(std::move(alt));
    }
    if (rule.alts.empty()) {
      throw GrammarError("rule '" + rule.name + "' has no alternatives");
    }
    g.ids_[rule.name] = static_cast<int>(g.rules_.size());
    g.rules_.push_back(std::move(rule));
  }
  if (g.rules_.empty()) {
    throw GrammarError("grammar has no rules");
  }

  // Resolve references and collect keyword literals.
  for (auto& rule : g.rules_) {
    for (auto& alt : rule.alts) {
      for (auto& sym : alt) {
        if (sym.kind == SymbolKind::Ref) {
          auto it = g.ids_.find(sym.text);
          if (it == g.ids_.end()) {
            throw GrammarError("undefined rule '" + sym.text
                               + "' referenced from '" + rule.name + "'");
          }
          sym.rule = it->second;
        } else if (sym.kind == SymbolKind::Lit && identifier_shaped(sym.text)) {
          g.keywords_.insert(sym.text);
        }
      }
    }
    if (rule.transparent) {
      for (const auto& alt : rule.alts) {
        if (alt.size() != 1 || alt[0].kind != SymbolKind::Ref
            || alt[0].quant != Quantifier::One
            || g.rules_[alt[0].rule].transparent) {
          throw GrammarError(
              "transparent rule '" + rule.name
              + "': every alternative must be a single plain reference to a "
                "non-transparent rule");
        }
      }
    }
  }

  const std::string start_name = doc.at("start").get<std::string>();
  auto it = g.ids_.find(start_name);
  if (it == g.ids_.end()) {
    throw GrammarError("start rule '" + start_name + "' is not defined");
  }
  g.start_ = it->second;
  if (g.rules_[g.start_].transparent) {
    throw GrammarError("start rule '" + start_name + "' may not be transparent");
  }
  return g;
}

int Grammar::rule_id(const std::string& name) const
{
  auto it = ids_.find(name);
  if (it == ids_.end()) {
    throw GrammarError("unknown rule '" + name + "'");
  }
  return it->second;
}

bool Grammar::has_rule(const std::string& name) const
{
  return ids_.count(name) != 0;
}

const RuleDef& Grammar::rule(int id) const
{
  if (id < 0 || id >= rule_count()) {
    throw GrammarError("rule id " + std::to_string(id) + " out of range");
  }
  return rules_[id];
}

const std::string& Grammar::rule_name(int id) const
{
  return rule(id).name;
}

Grammar load_grammar(const std::string& path)
{
  return Grammar::from_json(read_file(path));
}

}  // namespace semred
