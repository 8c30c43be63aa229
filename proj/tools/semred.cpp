#include <algorithm>
#include <filesystem>
#include <iostream>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "semred/datagen.hpp"
#include "semred/errors.hpp"
#include "semred/features.hpp"
#include "semred/forest.hpp"
#include "semred/grammar.hpp"
#include "semred/metrics.hpp"
#include "semred/oracle.hpp"
#include "semred/reducer.hpp"
#include "semred/semantics.hpp"
#include "semred/syntax_tree.hpp"
#include "semred/util.hpp"

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_command(const std::string& cmd)
{
  std::istringstream in(cmd);
  std::vector<std::string> parts;
  std::string word;
  while (in >> word) parts.push_back(word);
  return parts;
}

std::vector<fs::path> sorted_files(const std::string& dir,
                                   const std::string& extension)
{
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == extension) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

int cmd_check(const std::string& grammar_path, const std::string& file)
{
  semred::Grammar g = semred::load_grammar(grammar_path);
  semred::SyntaxTree t = semred::parse(g, semred::read_file(file));
  auto issues = semred::check(t);
  for (const auto& issue : issues) {
    std::cout << semred::issue_code_name(issue.code) << ' ' << issue.subject
              << " @" << issue.location << '\n';
  }
  return issues.empty() ? 0 : 1;
}

int cmd_parse(const std::string& grammar_path, const std::string& input,
              const std::string& out)
{
  semred::Grammar g = semred::load_grammar(grammar_path);
  semred::SyntaxTree t = semred::parse(g, semred::read_file(input));
  std::string json = semred::tree_to_json(t) + "\n";
  if (out.empty()) {
    std::cout << json;
  } else {
    semred::write_file(out, json);
  }
  return 0;
}

struct ReduceArgs
{
  std::string grammar;
  std::string input;
  std::string oracle_cmd;
  bool check_semantics = false;
  std::string keep_token;
  std::string model;
  std::string mode;
  bool study = false;
  std::string trace;
  std::string output;
  int passes = 1;
  double timeout = 10.0;
};

int cmd_reduce(const ReduceArgs& args)
{
  semred::Grammar g = semred::load_grammar(args.grammar);
  semred::SyntaxTree t = semred::parse(g, semred::read_file(args.input));

  if (args.oracle_cmd.empty() && !args.check_semantics) {
    throw semred::Error(
        "no oracle: pass --oracle CMD and/or --check-semantics");
  }

  semred::CommandSpec cmd;
  if (!args.oracle_cmd.empty()) {
    auto parts = split_command(args.oracle_cmd);
    if (parts.empty()) {
      throw semred::Error("--oracle command is empty");
    }
    cmd.program = parts[0];
    cmd.args.assign(parts.begin() + 1, parts.end());
    cmd.timeout_seconds = args.timeout;
  }

  semred::PropertyFn property = [&](const semred::SyntaxTree& cand) {
    if (!args.keep_token.empty()) {
      const auto& toks = cand.tokens();
      if (std::find(toks.begin(), toks.end(), args.keep_token) == toks.end()) {
        return false;
      }
    }
    if (!args.oracle_cmd.empty()) {
      return semred::run_external(cmd, semred::print(cand));
    }
    return true;
  };

  std::unique_ptr<semred::Oracle> oracle;
  if (args.check_semantics) {
    oracle = std::make_unique<semred::CompositeOracle>(property);
  } else if (!args.keep_token.empty()) {
    oracle = std::make_unique<semred::CompositeOracle>(
        property, [](const semred::SyntaxTree&) {
          return std::vector<semred::SemanticIssue>{};
        });
  } else {
    oracle = std::make_unique<semred::ExternalOracle>(cmd);
  }

  semred::ReduceResult result{t, {}, 0.0, 0, 0, 0, 0};
  if (!args.model.empty()) {
    semred::Forest forest = semred::load_forest(args.model, g);
    semred::ForestModel model(forest);
    semred::FeatureMode mode =
        args.mode.empty() ? forest.mode
                          : semred::feature_mode_from_name(args.mode);
    result = args.study
                 ? semred::reduce_study(t, *oracle, model, mode, args.passes)
                 : semred::reduce_guided(t, *oracle, model, mode, args.passes);
  } else {
    if (args.study) {
      throw semred::Error("--study needs --model");
    }
    std::optional<semred::FeatureMode> record;
    if (!args.mode.empty()) {
      record = semred::feature_mode_from_name(args.mode);
    }
    result = semred::reduce_baseline(t, *oracle, args.passes, record);
  }

  std::string reduced = semred::print(result.tree);
  if (args.output.empty()) {
    std::cout << reduced;
  } else {
    semred::write_file(args.output, reduced);
  }
  if (!args.trace.empty()) {
    semred::write_trace(args.trace, result.trials);
  }
  std::cerr << semred::render_text(
      semred::summarize(result.trials, result.wall_time));
  return 0;
}

int cmd_collect(const std::string& grammar_path, const std::string& corpus_dir,
                const std::string& mode_name, uint64_t seed,
                const std::string& out)
{
  semred::Grammar g = semred::load_grammar(grammar_path);
  semred::FeatureMode mode = semred::feature_mode_from_name(mode_name);
  std::vector<std::pair<std::string, std::string>> corpus;
  for (const fs::path& p : sorted_files(corpus_dir, ".c")) {
    corpus.push_back({p.filename().string(), semred::read_file(p.string())});
  }
  semred::Dataset d = semred::collect(g, corpus, mode, seed);
  semred::write_dataset(out, d);
  std::cerr << "collected " << d.rows.size() << " datapoints from "
            << corpus.size() << " files\n";
  return 0;
}

int cmd_split(const std::string& in, double frac, uint64_t seed,
              const std::string& train_out, const std::string& test_out)
{
  semred::Dataset d = semred::read_dataset(in);
  auto [train, test] = semred::split_dataset(d, frac, seed);
  semred::write_dataset(train_out, train);
  semred::write_dataset(test_out, test);
  std::cerr << "split " << d.rows.size() << " rows into " << train.rows.size()
            << " train / " << test.rows.size() << " test\n";
  return 0;
}

int cmd_train(const std::string& data, const std::string& out,
              const semred::ForestParams& params)
{
  semred::Dataset d = semred::read_dataset(data);
  semred::Forest f =
      semred::train(semred::to_training_rows(d), params, d.grammar_hash);
  semred::save_forest(f, out);
  std::cerr << "trained " << f.params.n_trees << " trees on " << d.rows.size()
            << " rows (" << semred::feature_mode_name(f.mode) << ")\n";
  return 0;
}

int cmd_eval(const std::string& trace, bool study, const std::string& format,
             std::string name)
{
  auto trials = semred::read_trace(trace);
  double wall =
      std::accumulate(trials.begin(), trials.end(), 0.0,
                      [](double acc, const semred::TrialRecord& r) {
                        return acc + r.elapsed;
                      });
  semred::Report report = semred::summarize(trials, wall);
  if (study && !report.matrix) {
    semred::confusion(trials);  // throws with a precise reason
  }
  if (name.empty()) {
    name = fs::path(trace).stem().string();
  }
  if (format == "csv") {
    std::cout << semred::csv_header() << '\n'
              << semred::render_csv_row(report, name) << '\n';
  } else {
    std::cout << semred::render_text(report);
  }
  return 0;
}

int cmd_report(const std::string& traces_dir, const std::string& out)
{
  std::ostringstream csv;
  csv << semred::csv_header() << '\n';
  semred::Confusion pooled;
  bool any_matrix = false;
  double macro_p = 0.0, macro_r = 0.0;
  long macro_n = 0;

  for (const fs::path& p : sorted_files(traces_dir, ".jsonl")) {
    auto trials = semred::read_trace(p.string());
    double wall =
        std::accumulate(trials.begin(), trials.end(), 0.0,
                        [](double acc, const semred::TrialRecord& r) {
                          return acc + r.elapsed;
                        });
    semred::Report report = semred::summarize(trials, wall);
    csv << semred::render_csv_row(report, p.stem().string()) << '\n';
    if (report.matrix) {
      pooled += *report.matrix;
      any_matrix = true;
      if (report.precision && report.recall) {
        macro_p += *report.precision;
        macro_r += *report.recall;
        ++macro_n;
      }
    }
  }
  if (any_matrix) {
    semred::Report micro;
    micro.matrix = pooled;
    micro.precision = semred::precision(pooled);
    micro.recall = semred::recall(pooled);
    csv << semred::render_csv_row(micro, "micro") << '\n';
    if (macro_n > 0) {
      semred::Report macro;
      macro.precision = macro_p / static_cast<double>(macro_n);
      macro.recall = macro_r / static_cast<double>(macro_n);
      csv << semred::render_csv_row(macro, "macro") << '\n';
    }
  }
  if (out.empty()) {
    std::cout << csv.str();
  } else {
    semred::write_file(out, csv.str());
  }
  return 0;
}

int cmd_generate(int count, uint64_t seed, const std::string& out_dir,
                 const std::string& prefix)
{
  fs::create_directories(out_dir);
  auto corpus = semred::generate_corpus(count, seed, prefix);
  for (const auto& [name, source] : corpus) {
    semred::write_file((fs::path(out_dir) / name).string(), source);
  }
  std::cerr << "wrote " << corpus.size() << " programs to " << out_dir
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"semred: grammar-driven test-case reduction with a learned "
               "semantic-validity filter"};
  app.require_subcommand(1);

  // check
  auto* check = app.add_subcommand(
      "check", "run the mini-C semantic checker on a source file");
  std::string check_grammar, check_file;
  check->add_option("--grammar", check_grammar, "grammar JSON")->required();
  check->add_option("file", check_file, "source file")->required();

  // parse
  auto* parse = app.add_subcommand("parse", "parse a source file to tree JSON");
  std::string parse_grammar, parse_input, parse_out;
  parse->add_option("--grammar", parse_grammar, "grammar JSON")->required();
  parse->add_option("--input", parse_input, "source file")->required();
  parse->add_option("--out", parse_out, "output path (default stdout)");

  // reduce
  auto* reduce = app.add_subcommand("reduce", "reduce a failure-inducing input");
  ReduceArgs ra;
  reduce->add_option("--grammar", ra.grammar, "grammar JSON")->required();
  reduce->add_option("--input", ra.input, "source file")->required();
  reduce->add_option("--oracle", ra.oracle_cmd,
                     "command run per candidate; candidate path is appended; "
                     "exit 0 keeps the candidate");
  reduce->add_flag("--check-semantics", ra.check_semantics,
                   "require candidates to pass the mini-C checker");
  reduce->add_option("--keep-token", ra.keep_token,
                     "require candidates to keep a token with this text");
  reduce->add_option("--model", ra.model, "trained model JSON");
  reduce->add_option("--mode", ra.mode,
                     "feature mode (default: the model's)");
  reduce->add_flag("--study", ra.study,
                   "record predictions but query the oracle on every trial");
  reduce->add_option("--trace", ra.trace, "trial trace output (JSONL)");
  reduce->add_option("--output", ra.output, "reduced source output");
  reduce->add_option("--passes", ra.passes, "max fixpoint passes")
      ->default_val(1);
  reduce->add_option("--timeout", ra.timeout, "oracle timeout in seconds")
      ->default_val(10.0);

  // collect
  auto* collect = app.add_subcommand(
      "collect", "harvest labeled trials from a corpus of valid programs");
  std::string col_grammar, col_corpus, col_mode = "type", col_out;
  uint64_t col_seed = 0;
  collect->add_option("--grammar", col_grammar, "grammar JSON")->required();
  collect->add_option("--corpus", col_corpus, "directory of .c files")
      ->required();
  collect->add_option("--mode", col_mode, "feature mode")->default_val("type");
  collect->add_option("--seed", col_seed, "RNG seed")->default_val(0);
  collect->add_option("--out", col_out, "dataset output (JSONL)")->required();

  // split
  auto* split = app.add_subcommand("split", "shuffle-split a dataset");
  std::string split_in, split_train, split_test;
  double split_frac = 0.8;
  uint64_t split_seed = 0;
  split->add_option("--in", split_in, "dataset JSONL")->required();
  split->add_option("--frac", split_frac, "train fraction")->default_val(0.8);
  split->add_option("--seed", split_seed, "RNG seed")->default_val(0);
  split->add_option("--train-out", split_train, "train output")->required();
  split->add_option("--test-out", split_test, "test output")->required();

  // train
  auto* train = app.add_subcommand("train", "train a random forest");
  std::string train_data, train_out;
  semred::ForestParams params;
  train->add_option("--data", train_data, "training dataset JSONL")
      ->required();
  train->add_option("--out", train_out, "model output JSON")->required();
  train->add_option("--trees", params.n_trees, "tree count")->default_val(100);
  train->add_option("--max-depth", params.max_depth, "depth cap")
      ->default_val(16);
  train->add_option("--min-leaf", params.min_samples_leaf,
                    "min samples per leaf")
      ->default_val(1);
  train->add_option("--mtry", params.features_per_split,
                    "features per split (0: ceil sqrt F)")
      ->default_val(0);
  train->add_option("--seed", params.seed, "RNG seed")->default_val(0);

  // eval
  auto* eval = app.add_subcommand("eval", "summarize a reduction trace");
  std::string eval_trace, eval_format = "text", eval_name;
  bool eval_study = false;
  eval->add_option("--trace", eval_trace, "trace JSONL")->required();
  eval->add_flag("--study", eval_study,
                 "require a full confusion matrix (study traces)");
  eval->add_option("--format", eval_format, "text or csv")
      ->default_val("text")
      ->check(CLI::IsMember({"text", "csv"}));
  eval->add_option("--name", eval_name, "row label for csv output");

  // report
  auto* report = app.add_subcommand(
      "report", "aggregate a directory of traces into a CSV table");
  std::string report_dir, report_out;
  report->add_option("--traces", report_dir, "directory of .jsonl traces")
      ->required();
  report->add_option("--out", report_out, "CSV output (default stdout)");

  // generate
  auto* generate = app.add_subcommand(
      "generate", "emit a deterministic corpus of valid mini-C programs");
  int gen_count = 10;
  uint64_t gen_seed = 0;
  std::string gen_out, gen_prefix = "gen";
  generate->add_option("--count", gen_count, "program count")->default_val(10);
  generate->add_option("--seed", gen_seed, "RNG seed")->default_val(0);
  generate->add_option("--out", gen_out, "output directory")->required();
  generate->add_option("--prefix", gen_prefix, "file name prefix")
      ->default_val("gen");

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) return cmd_check(check_grammar, check_file);
    if (parse->parsed()) return cmd_parse(parse_grammar, parse_input, parse_out);
    if (reduce->parsed()) return cmd_reduce(ra);
    if (collect->parsed()) {
      return cmd_collect(col_grammar, col_corpus, col_mode, col_seed, col_out);
    }
    if (split->parsed()) {
      return cmd_split(split_in, split_frac, split_seed, split_train,
                       split_test);
    }
    if (train->parsed()) return cmd_train(train_data, train_out, params);
    if (eval->parsed()) {
      return cmd_eval(eval_trace, eval_study, eval_format, eval_name);
    }
    if (report->parsed()) return cmd_report(report_dir, report_out);
    if (generate->parsed()) {
      return cmd_generate(gen_count, gen_seed, gen_out, gen_prefix);
    }
  } catch (const semred::LexError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const semred::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const semred::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
