#include "semred/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "semred/errors.hpp"
#include "semred/oracle.hpp"
#include "semred/reducer.hpp"
#include "semred/semantics.hpp"
#include "semred/syntax_tree.hpp"
#include "semred/util.hpp"

namespace semred {

namespace {

SubOutcome classify(const OracleOutcome& out)
{
  switch (out.kind) {
    case OracleOutcome::Kind::Passed: return SubOutcome::SemValidTokenKept;
    case OracleOutcome::Kind::NonSemanticFail:
      return SubOutcome::SemValidTokenLost;
    case OracleOutcome::Kind::SemanticFail: return SubOutcome::SemInvalid;
  }
  return SubOutcome::SemInvalid;
}

/** Reduce while preserving stable token `token_id`; log every trial. */
SyntaxTree collect_phase(const SyntaxTree& t, int token_id, FeatureMode mode,
                         const std::string& name, int& trial_counter,
                         std::vector<Datapoint>& out)
{
  CompositeOracle oracle([token_id](const SyntaxTree& cand) {
    return cand.has_token_id(token_id);
  });
  ReduceResult result = reduce_baseline(t, oracle, 1, mode);
  for (const TrialRecord& rec : result.trials) {
    Datapoint p;
    p.features = *rec.features;
    p.sub_outcome = classify(*rec.outcome);
    p.label = p.sub_outcome == SubOutcome::SemValidTokenKept;
    p.source_file = name;
    p.trial_index = trial_counter++;
    out.push_back(std::move(p));
  }
  return std::move(result.tree);
}

}  // namespace

const char* sub_outcome_name(SubOutcome s)
{
  switch (s) {
    case SubOutcome::SemValidTokenKept: return "sem_valid_token_kept";
    case SubOutcome::SemValidTokenLost: return "sem_valid_token_lost";
    case SubOutcome::SemInvalid: return "sem_invalid";
  }
  return "sem_invalid";
}

SubOutcome sub_outcome_from_name(const std::string& name)
{
  if (name == "sem_valid_token_kept") return SubOutcome::SemValidTokenKept;
  if (name == "sem_valid_token_lost") return SubOutcome::SemValidTokenLost;
  if (name == "sem_invalid") return SubOutcome::SemInvalid;
  throw DatasetError("unknown sub-outcome '" + name + "'");
}

std::vector<Datapoint> collect_from_source(const Grammar& g,
                                           const std::string& name,
                                           const std::string& source,
                                           FeatureMode mode, uint64_t seed)
{
  SyntaxTree t = parse(g, source);
  std::mt19937_64 rng(fnv1a64_mix(fnv1a64(name), seed));

  std::vector<Datapoint> out;
  std::vector<char> preserved;  // indexed by stable token id
  preserved.resize(t.token_count(), 0);
  int trial_counter = 0;

  while (true) {
    std::vector<int> candidates;
    for (int id : t.token_ids()) {
      if (!preserved[id]) candidates.push_back(id);
    }
    if (candidates.empty()) break;
    int k = candidates[rng() % candidates.size()];
    t = collect_phase(t, k, mode, name, trial_counter, out);
    preserved[k] = 1;
  }
  return out;
}

Dataset collect(const Grammar& g,
                const std::vector<std::pair<std::string, std::string>>& corpus,
                FeatureMode mode, uint64_t seed, std::ostream* log)
{
  Dataset d;
  d.mode = mode;
  d.grammar_hash = g.hash();
  std::ostream& err = log ? *log : std::cerr;
  for (const auto& [name, source] : corpus) {
    try {
      auto rows = collect_from_source(g, name, source, mode, seed);
      d.rows.insert(d.rows.end(), rows.begin(), rows.end());
    } catch (const Error& e) {
      err << "skipping " << name << ": " << e.what() << '\n';
    }
  }
  return d;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& d,
                                          double train_fraction,
                                          uint64_t seed)
{
  if (!(train_fraction > 0.0) || !(train_fraction < 1.0)) {
    throw DatasetError("train fraction must be strictly between 0 and 1");
  }
  std::vector<size_t> order(d.rows.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng() % i]);
  }
  size_t n_train = static_cast<size_t>(
      std::llround(train_fraction * static_cast<double>(d.rows.size())));
  n_train = std::min(n_train, d.rows.size());

  Dataset train{d.mode, d.grammar_hash, {}};
  Dataset test{d.mode, d.grammar_hash, {}};
  for (size_t i = 0; i < order.size(); ++i) {
    (i < n_train ? train : test).rows.push_back(d.rows[order[i]]);
  }
  return {std::move(train), std::move(test)};
}

std::vector<TrainingRow> to_training_rows(const Dataset& d)
{
  std::vector<TrainingRow> rows;
  rows.reserve(d.rows.size());
  for (const Datapoint& p : d.rows) {
    rows.push_back({p.features, p.label});
  }
  return rows;
}

std::string datapoint_to_json_line(const Datapoint& p, FeatureMode mode,
                                   const std::string& grammar_hash)
{
  nlohmann::json j;
  j["mode"] = feature_mode_name(mode);
  j["grammar_hash"] = grammar_hash;
  j["values"] = p.features.values;
  j["label"] = p.label;
  j["sub_outcome"] = sub_outcome_name(p.sub_outcome);
  j["source_file"] = p.source_file;
  j["trial_index"] = p.trial_index;
  return j.dump();
}

void write_dataset(const std::string& path, const Dataset& d)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DatasetError("cannot write dataset '" + path + "'");
  }
  for (const Datapoint& p : d.rows) {
    out << datapoint_to_json_line(p, d.mode, d.grammar_hash) << '\n';
  }
}

Dataset read_dataset(const std::string& path, const std::string& expect_hash)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DatasetError("cannot open dataset '" + path + "'");
  }
  Dataset d;
  bool first = true;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DatasetError("dataset line " + std::to_string(line_no)
                         + " is not valid JSON: " + e.what());
    }
    FeatureMode mode = feature_mode_from_name(j.at("mode").get<std::string>());
    std::string hash = j.at("grammar_hash").get<std::string>();
    if (first) {
      d.mode = mode;
      d.grammar_hash = hash;
      first = false;
    } else if (mode != d.mode || hash != d.grammar_hash) {
      throw DatasetError("dataset line " + std::to_string(line_no)
                         + " disagrees on mode or grammar hash");
    }

    Datapoint p;
    p.features.mode = mode;
    p.features.values = j.at("values").get<std::vector<int>>();
    p.label = j.at("label").get<bool>();
    p.sub_outcome =
        sub_outcome_from_name(j.at("sub_outcome").get<std::string>());
    p.source_file = j.at("source_file").get<std::string>();
    p.trial_index = j.at("trial_index").get<int>();
    if (p.label != (p.sub_outcome == SubOutcome::SemValidTokenKept)) {
      throw DatasetError("dataset line " + std::to_string(line_no)
                         + ": label contradicts sub_outcome");
    }
    d.rows.push_back(std::move(p));
  }
  if (!expect_hash.empty() && !d.rows.empty()
      && d.grammar_hash != expect_hash) {
    throw DatasetError("dataset was collected for grammar hash "
                       + d.grammar_hash + ", expected " + expect_hash);
  }
  return d;
}

/* ------------------------------------------------------------------ */
/* Corpus generator                                                    */
/* ------------------------------------------------------------------ */

namespace {

class ProgramWriter
{
 public:
  explicit ProgramWriter(uint64_t seed)
      : rng_(fnv1a64_mix(0x5eed5eed5eed5eedull, seed))
  {
  }

  std::string build()
  {
    int n_structs = pick(3);  // 0..2
    for (int i = 0; i < n_structs; ++i) emit_struct(i);
    int n_globals = 1 + pick(3);  // 1..3
    for (int i = 0; i < n_globals; ++i) emit_global(i);
    int n_funcs = 7 + pick(5);  // 7..11, the last one is main
    for (int i = 0; i < n_funcs; ++i) emit_function(i, i == n_funcs - 1);
    return out_.str();
  }

 private:
  int pick(int n) { return static_cast<int>(rng_() % n); }
  bool chance(int pct) { return pick(100) < pct; }

  void emit_struct(int index)
  {
    std::string name = "S" + std::to_string(index);
    int members = 1 + pick(3);
    out_ << "struct " << name << " {\n";
    for (int m = 0; m < members; ++m) {
      out_ << "  int m" << m << ";\n";
    }
    out_ << "};\n";
    structs_.push_back({name, members});
  }

  void emit_global(int index)
  {
    std::string name = "g" + std::to_string(index);
    out_ << "int " << name << " = " << pick(90) + 1 << ";\n";
    globals_.push_back(name);
  }

  /** Expression over declared names; biased toward pending unused vars. */
  std::string expr(std::vector<std::string>& vars,
                   std::vector<std::string>& unused, int depth)
  {
    auto atom = [&]() -> std::string {
      if (!unused.empty() && chance(35)) {
        size_t i = rng_() % unused.size();
        std::string v = unused[i];
        unused.erase(unused.begin() + static_cast<long>(i));
        return v;
      }
      if (!vars.empty() && chance(40)) {
        return vars[rng_() % vars.size()];
      }
      return std::to_string(pick(90) + 1);
    };
    std::string e = atom();
    if (depth > 0 && chance(35)) {
      e += (chance(50) ? " + " : " - ") + expr(vars, unused, depth - 1);
    }
    if (depth > 0 && chance(10)) {
      e = "(" + e + ")";
    }
    return e;
  }

  std::string call(std::vector<std::string>& vars,
                   std::vector<std::string>& unused)
  {
    if (!funcs_.empty() && chance(55)) {
      const auto& [name, arity] = funcs_[rng_() % funcs_.size()];
      std::string c = name + "(";
      for (int a = 0; a < arity; ++a) {
        if (a) c += ", ";
        c += expr(vars, unused, 0);
      }
      return c + ")";
    }
    static const char* messages[] = {"\"ok\\n\"", "\"step %d\\n\"",
                                     "\"done\\n\""};
    return std::string("printf(") + messages[pick(3)] + ")";
  }

  void emit_function(int index, bool is_main)
  {
    std::string name = is_main ? "main" : "f" + std::to_string(index);
    int arity = is_main ? 0 : pick(3);

    // Locals and params only; globals are referenced sparingly so most
    // stay unused once other functions are gone.
    std::vector<std::string> vars;
    std::vector<std::string> unused;
    out_ << "int " << name << "(";
    for (int p = 0; p < arity; ++p) {
      if (p) out_ << ", ";
      std::string pname = "p" + std::to_string(p);
      out_ << "int " << pname;
      vars.push_back(pname);
      unused.push_back(pname);
    }
    out_ << ") {\n";

    std::vector<std::pair<std::string, int>> struct_vars;  // (var, struct idx)
    int locals = 0;
    int n_stmts = 3 + pick(4);  // 3..6 before the return
    for (int s = 0; s < n_stmts; ++s) {
      int kind = pick(100);
      if (kind < 10 && !globals_.empty()) {
        out_ << "  " << globals_[rng_() % globals_.size()] << " = "
             << expr(vars, unused, 1) << ";\n";
      } else if (kind < 45) {
        if (!structs_.empty() && chance(25)) {
          int si = pick(static_cast<int>(structs_.size()));
          std::string v = "sv" + std::to_string(locals++);
          out_ << "  struct " << structs_[si].first << " " << v << ";\n";
          struct_vars.push_back({v, si});
        } else {
          std::string v = "v" + std::to_string(locals++);
          std::string init = chance(55) ? std::to_string(pick(90) + 1)
                                        : expr(vars, unused, 1);
          out_ << "  int " << v << " = " << init << ";\n";
          vars.push_back(v);
          unused.push_back(v);
        }
      } else if (kind < 62 && (!struct_vars.empty() || !vars.empty())) {
        if (!struct_vars.empty() && (vars.empty() || chance(60))) {
          const auto& [v, si] = struct_vars[rng_() % struct_vars.size()];
          out_ << "  " << v << ".m" << pick(structs_[si].second) << " = "
               << expr(vars, unused, 1) << ";\n";
        } else {
          out_ << "  " << vars[rng_() % vars.size()] << " = "
               << expr(vars, unused, 1) << ";\n";
        }
      } else if (kind < 84) {
        out_ << "  " << call(vars, unused) << ";\n";
      } else {
        out_ << "  " << expr(vars, unused, 2) << ";\n";
      }
    }
    out_ << "  return " << expr(vars, unused, 1) << ";\n";
    out_ << "}\n";
    funcs_.push_back({name, arity});
  }

  std::mt19937_64 rng_;
  std::ostringstream out_;
  std::vector<std::pair<std::string, int>> structs_;  // (name, members)
  std::vector<std::string> globals_;
  std::vector<std::pair<std::string, int>> funcs_;  // (name, arity)
};

}  // namespace

std::string generate_program(uint64_t seed)
{
  return ProgramWriter(seed).build();
}

std::vector<std::pair<std::string, std::string>> generate_corpus(
    int count, uint64_t seed, const std::string& name_prefix)
{
  std::vector<std::pair<std::string, std::string>> corpus;
  for (int i = 0; i < count; ++i) {
    corpus.push_back({name_prefix + "_" + std::to_string(i) + ".c",
                      generate_program(fnv1a64_mix(seed, i))});
  }
  return corpus;
}

}  // namespace semred
