#include "vcdm/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "vcdm/checkpoint.hpp"
#include "vcdm/corpus.hpp"
#include "vcdm/errors.hpp"
#include "vcdm/evaluation.hpp"
#include "vcdm/logging.hpp"
#include "vcdm/text.hpp"
#include "vcdm/training.hpp"

namespace vcdm {

namespace {

std::string percent(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2) << v * 100.0;
  return out.str();
}

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string());
  std::vector<nlohmann::json> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (normalize_whitespace(line).empty()) continue;
    try {
      rows.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::parse_error& e) {
      throw SchemaError(file.filename().string() + ":" + std::to_string(line_no) + ": invalid JSON (" + e.what() + ")");
    }
    if (!rows.back().is_object())
      throw SchemaError(file.filename().string() + ":" + std::to_string(line_no) + ": expected a JSON object");
  }
  return rows;
}

std::string string_field(const nlohmann::json& row, std::initializer_list<const char*> keys,
                         const std::string& where) {
  for (const char* key : keys) {
    if (auto it = row.find(key); it != row.end()) {
      if (!it->is_string()) throw SchemaError(where + ": \"" + key + "\" must be a string");
      return it->get<std::string>();
    }
  }
  throw SchemaError(where + ": missing \"" + *keys.begin() + "\"");
}

std::vector<double> read_scores(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string());
  std::vector<double> scores;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = normalize_whitespace(line);
    if (line.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(line, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != line.size())
      throw SchemaError(file.filename().string() + ":" + std::to_string(line_no) + ": not a number: " + line);
    scores.push_back(v);
  }
  return scores;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed on " + path.string());
}

// ---- commands ---------------------------------------------------------------

struct TrainArgs {
  std::string data, config, out;
  std::optional<std::uint64_t> seed;
};

int cmd_train(const TrainArgs& a) {
  RunConfig config = a.config.empty() ? RunConfig{} : load_config(a.config);
  if (a.seed) config.train.seed = *a.seed;
  validate_config(config);
  logging::info("train: seed ", config.train.seed, ", resolved config:\n", serialize_config(config));
  const Corpus corpus = load_corpus(a.data);
  const FitResult result = fit(corpus, config, FitOptions{std::filesystem::path(a.out), {}});
  std::cout << "trained " << result.metrics.size() << " epochs (" << result.steps << " steps); best epoch "
            << result.best_epoch << "; checkpoint " << (std::filesystem::path(a.out) / "model.ckpt").string() << '\n';
  return 0;
}

struct GenerateArgs {
  std::string model, input, out;
  std::size_t beam = 5;
  std::size_t max_len = 32;
  bool use_posterior = false;
};

int cmd_generate(const GenerateArgs& a) {
  if (a.beam < 1 || a.max_len < 1) throw ContractError("--beam and --max-len must be >= 1");
  const LoadedCheckpoint ckpt = load_checkpoint(a.model);
  logging::info("generate: beam ", a.beam, ", max_len ", a.max_len, ", seed ", ckpt.config.train.seed,
                ", resolved config:\n", serialize_config(ckpt.config));
  const auto examples = read_examples(a.input, a.use_posterior);
  std::string text;
  for (const auto& ex : examples) {
    const PreparedExample prepared = ckpt.model.prepare(ex);
    const Generation g = ckpt.model.generate(prepared, a.beam, a.max_len, a.use_posterior);
    nlohmann::json row{{"phrase", ex.phrase},
                       {"context", ex.context},
                       {"definition_generated", detokenize(g.tokens)},
                       {"log_prob", g.log_prob}};
    text += row.dump() + "\n";
    std::cout << ex.phrase << "\t" << detokenize(g.tokens) << '\n';
  }
  write_file_atomic(a.out, text);
  logging::info("wrote ", examples.size(), " generations to ", a.out);
  return 0;
}

struct EvaluateArgs {
  std::string hyp, ref, out;
  std::string aggregation = "example_wise";
  std::string format = "text";
};

int cmd_evaluate(const EvaluateArgs& a) {
  const Aggregation aggregation = parse_aggregation(a.aggregation);
  logging::info("evaluate: aggregation ", a.aggregation);
  const auto hyps = read_jsonl(a.hyp);
  const auto refs = read_jsonl(a.ref);
  if (hyps.size() != refs.size())
    throw ContractError("hypothesis and reference files are misaligned (" + std::to_string(hyps.size()) + " vs " +
                        std::to_string(refs.size()) + " lines)");
  std::vector<ScoredOutput> outputs;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    const std::string where = "line " + std::to_string(i + 1);
    const std::string hyp = string_field(hyps[i], {"definition_generated", "definition"}, a.hyp + " " + where);
    const std::string ref = string_field(refs[i], {"definition"}, a.ref + " " + where);
    std::string id = std::to_string(i);
    if (auto it = refs[i].find("id"); it != refs[i].end()) id = it->is_string() ? it->get<std::string>() : it->dump();
    std::optional<std::string> sense;
    if (auto it = refs[i].find("sense_id"); it != refs[i].end() && !it->is_null()) {
      if (!it->is_string()) throw SchemaError(a.ref + " " + where + ": \"sense_id\" must be a string");
      sense = it->get<std::string>();
    }
    const auto ref_tokens = tokenize(ref);
    if (ref_tokens.empty()) throw SchemaError(a.ref + " " + where + ": empty reference");
    outputs.push_back(score_output(std::move(id), tokenize(hyp), ref_tokens, std::move(sense)));
  }
  const EvalReport report = corpus_eval(std::move(outputs), aggregation);
  const nlohmann::json j = report_to_json(report);
  if (!a.out.empty()) write_text(a.out, j.dump(2) + "\n");
  if (a.format == "json") {
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "examples: " << report.n_examples << '\n';
    std::cout << "BLEU (example-wise): " << percent(report.bleu_example_wise) << '\n';
    if (report.bleu_sense_wise) {
      std::cout << "senses: " << report.n_senses << '\n';
      std::cout << "BLEU (sense-wise): " << percent(*report.bleu_sense_wise) << '\n';
    }
  }
  return 0;
}

struct StatsArgs {
  std::string data;
  std::string format = "text";
};

int cmd_stats(const StatsArgs& a) {
  logging::info("stats: data ", a.data);
  const CorpusStats stats = corpus_stats(load_corpus(a.data));
  if (a.format == "json") {
    std::cout << stats_to_json(stats).dump(2) << '\n';
  } else {
    std::cout << format_stats_table(stats);
  }
  return 0;
}

struct GradcheckArgs {
  std::string config;
  double eps = 1e-5;
  bool inject_fault = false;
};

int cmd_gradcheck(const GradcheckArgs& a) {
  if (!(a.eps > 0.0)) throw ContractError("--eps must be > 0");
  const RunConfig config = a.config.empty() ? RunConfig{} : load_config(a.config);
  logging::info("gradcheck: eps ", a.eps, ", seed ", config.train.seed, ", resolved config:\n",
                serialize_config(config));
  GradCheckOptions options;
  options.epsilon = a.eps;
  options.inject_fault = a.inject_fault;
  const GradCheckReport r = check_model_gradients(config, options);
  constexpr double kTolerance = 1e-4;
  const bool ok = r.max_relative_error < kTolerance;
  std::cout << (ok ? "PASS" : "FAIL") << ": max relative error " << r.max_relative_error << " at "
            << r.worst_parameter << "[" << r.worst_index << "] (analytic " << r.worst_analytic << ", numeric "
            << r.worst_numeric << "), " << r.checked << " entries checked\n";
  const nlohmann::json j{{"pass", ok},
                         {"max_relative_error", r.max_relative_error},
                         {"worst_parameter", r.worst_parameter},
                         {"worst_index", r.worst_index},
                         {"checked", r.checked}};
  std::cout << j.dump() << '\n';
  return ok ? 0 : 1;
}

struct SignificanceArgs {
  std::string scores_a, scores_b;
  std::string method = "bootstrap";
  std::size_t samples = 10000;
  std::uint64_t seed = 2;
};

int cmd_significance(const SignificanceArgs& a) {
  logging::info("significance: method ", a.method, ", samples ", a.samples, ", seed ", a.seed);
  const auto sa = read_scores(a.scores_a);
  const auto sb = read_scores(a.scores_b);
  nlohmann::json j{{"method", a.method}, {"n", sa.size()}};
  if (a.method == "bootstrap" || a.method == "both") {
    const double p = bootstrap_test(sa, sb, a.samples, a.seed);
    std::cout << "bootstrap p = " << std::setprecision(6) << p << " (" << a.samples << " samples, seed " << a.seed
              << ")\n";
    j["bootstrap_p"] = p;
    j["samples"] = a.samples;
    j["seed"] = a.seed;
  }
  if (a.method == "ttest" || a.method == "both") {
    const TTestResult t = paired_t_test(sa, sb);
    std::cout << "paired t-test t = " << std::setprecision(6) << t.t << ", dof = " << t.degrees_of_freedom
              << ", p = " << t.p_value << '\n';
    j["t"] = t.t;
    j["ttest_p"] = t.p_value;
  }
  std::cout << j.dump() << '\n';
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Variational contextual definition modeler"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Train a model on a corpus directory");
  t->add_option("--data", train.data, "Directory with train/valid/test.jsonl")->required();
  t->add_option("--config", train.config, "Config file (key = value lines)");
  t->add_option("--out", train.out, "Output directory")->required();
  t->add_option("--seed", train.seed, "Override the config seed");

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Generate definitions with a trained checkpoint");
  g->add_option("--model", gen.model, "Checkpoint file")->required();
  g->add_option("--input", gen.input, "JSONL with phrase and context")->required();
  g->add_option("--out", gen.out, "Output JSONL")->required();
  g->add_option("--beam", gen.beam, "Beam width")->capture_default_str();
  g->add_option("--max-len", gen.max_len, "Maximum generated tokens")->capture_default_str();
  g->add_flag("--use-posterior", gen.use_posterior, "Decode from the posterior mean (needs definitions)");

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "Score generations with sentence BLEU");
  e->add_option("--hyp", ev.hyp, "Hypothesis JSONL (definition_generated)")->required();
  e->add_option("--ref", ev.ref, "Reference JSONL (definition, optional sense_id)")->required();
  e->add_option("--aggregation", ev.aggregation, "example_wise or sense_wise")->capture_default_str();
  e->add_option("--out", ev.out, "Write the JSON report here");
  e->add_option("--format", ev.format, "Stdout format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();

  StatsArgs st;
  auto* s = app.add_subcommand("stats", "Corpus statistics table");
  s->add_option("--data", st.data, "Corpus directory")->required();
  s->add_option("--format", st.format, "Output format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();

  GradcheckArgs gc;
  auto* c = app.add_subcommand("gradcheck", "Finite-difference check of the training loss");
  c->add_option("--config", gc.config, "Config file");
  c->add_option("--eps", gc.eps, "Central difference step")->capture_default_str();
  c->add_flag("--inject-fault", gc.inject_fault)->group("");

  SignificanceArgs sg;
  auto* q = app.add_subcommand("significance", "Paired significance test on per-example scores");
  q->add_option("--scores-a", sg.scores_a, "One score per line")->required();
  q->add_option("--scores-b", sg.scores_b, "One score per line")->required();
  q->add_option("--method", sg.method)->check(CLI::IsMember({"bootstrap", "ttest", "both"}))->capture_default_str();
  q->add_option("--samples", sg.samples)->capture_default_str();
  q->add_option("--seed", sg.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return 1;
  }

  try {
    if (t->parsed()) return cmd_train(train);
    if (g->parsed()) return cmd_generate(gen);
    if (e->parsed()) return cmd_evaluate(ev);
    if (s->parsed()) return cmd_stats(st);
    if (c->parsed()) return cmd_gradcheck(gc);
    if (q->parsed()) return cmd_significance(sg);
  } catch (const IoError& err) {
    logging::error(err.what());
    return 2;
  } catch (const std::filesystem::filesystem_error& err) {
    logging::error(err.what());
    return 2;
  } catch (const std::exception& err) {
    logging::error(err.what());
    return 1;
  }
  return 1;
}

}  // namespace vcdm
