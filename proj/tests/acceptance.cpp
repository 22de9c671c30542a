// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstring>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "support.hpp"
#include "vcdm/checkpoint.hpp"
#include "vcdm/errors.hpp"
#include "vcdm/evaluation.hpp"
#include "vcdm/inferer.hpp"
#include "vcdm/logging.hpp"
#include "vcdm/text.hpp"
#include "vcdm/training.hpp"

using namespace vcdm;
using namespace vcdm::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int cli_process(const std::string& args) {
  const std::string cmd = "VCDM_LOG_LEVEL=error " + cli_path().string() + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// ---- 1 ------------------------------------------------------------------------

Outcome gradient_correctness() {
  Outcome o;
  const auto start = Clock::now();
  const RunConfig config = load_config(source_dir() / "configs" / "tiny.conf");
  o.check(config.model.latent_dim == 4 && config.model.decoder_hidden == 8 &&
              config.model.encoder.context_hidden == 16 && config.model.encoder.definition_hidden == 16,
          "tiny config dimensions");
  GradCheckOptions options;
  options.epsilon = 1e-5;
  const GradCheckReport r = check_model_gradients(config, options);
  const double elapsed = seconds_since(start);
  o.detail << "max relative error " << r.max_relative_error << " at " << r.worst_parameter << "[" << r.worst_index
           << "] over " << r.checked << " entries; " << std::fixed << std::setprecision(1) << elapsed << " s. ";
  o.check(synthetic_gradcheck_vocab().size() == 20, "vocab size 20");
  o.check(r.max_relative_error < 1e-4, "max relative error < 1e-4");
  o.check(elapsed < 60.0, "runtime < 60 s");
  o.check(cli_process("gradcheck --config " + (source_dir() / "configs" / "tiny.conf").string()) == 0, "cli exit 0");
  return o;
}

// ---- 2 ------------------------------------------------------------------------

Outcome kl_properties() {
  Outcome o;
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uni(-3.0, 3.0);

  const GaussianParams same{Tensor::vector({0.3, -1.2, 2.0}), Tensor::vector({0.1, -0.7, 1.5})};
  double max_same = 0.0;
  for (double k : kl_diag_gaussians(same, same).values()) max_same = std::max(max_same, std::abs(k));
  o.check(max_same <= 1e-12, "identical distributions give zero");

  const GaussianParams q{Tensor::vector({1.0}), Tensor::vector({0.0})};
  const GaussianParams p{Tensor::vector({0.0}), Tensor::vector({0.0})};
  const double closed = kl_diag_gaussians(q, p).item();
  // Monte Carlo estimate of E_q[log q(x) - log p(x)] with x ~ N(1, 1).
  double acc = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const double x = 1.0 + normal(rng);
    acc += -0.5 * (x - 1.0) * (x - 1.0) + 0.5 * x * x;
  }
  const double mc = acc / n;
  o.check(std::abs(closed - 0.5) < 1e-12, "closed form 0.5");
  o.check(std::abs(mc - closed) < 1e-2, "Monte Carlo within 1e-2");

  double min_kl = 0.0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> mq(5), lq(5), mp(5), lp(5);
    for (int d = 0; d < 5; ++d) {
      mq[d] = uni(rng), lq[d] = uni(rng), mp[d] = uni(rng), lp[d] = uni(rng);
    }
    const Tensor kl = kl_diag_gaussians({Tensor::vector(mq), Tensor::vector(lq)}, {Tensor::vector(mp), Tensor::vector(lp)});
    for (double k : kl.values()) min_kl = std::min(min_kl, k);
  }
  o.check(min_kl >= 0.0, "nonnegative over 1000 random pairs");
  o.detail << "max |KL(q,q)| " << max_same << "; closed " << closed << " vs MC " << mc << "; min KL " << min_kl;
  return o;
}

// ---- 3 ------------------------------------------------------------------------

Outcome free_bits_floor() {
  Outcome o;
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> dims(1, 16);
  std::uniform_real_distribution<double> rate(0.0, 3.0), unit(0.0, 1.0);
  int checked_identity = 0;
  for (int t = 0; t < 500; ++t) {
    const std::size_t d_z = static_cast<std::size_t>(dims(rng));
    const double lambda = rate(rng);
    const FreeBits fb = FreeBits::from(lambda, FreeBitsMode::total, d_z);
    const bool all_above = t % 2 == 0;
    std::vector<double> kl(d_z);
    double raw = 0.0;
    for (auto& k : kl) {
      k = all_above ? fb.floor() + 1e-6 + unit(rng) : unit(rng) * 2.0 * fb.floor();
      raw += k;
    }
    const double eff = fb.value(kl);
    const double eff_tensor = fb.apply(Tensor::vector(kl)).item();
    if (!(eff >= lambda - 1e-12)) o.check(false, "kl_effective >= lambda (trial " + std::to_string(t) + ")");
    if (eff != eff_tensor) o.check(false, "tensor and scalar paths agree");
    if (all_above) {
      ++checked_identity;
      if (std::abs(eff - raw) > 1e-12) o.check(false, "equals kl_raw when all above floor");
    }
  }
  o.detail << "500 random KL vectors, " << checked_identity << " with every dimension above the floor";
  return o;
}

// ---- 4 ------------------------------------------------------------------------

Outcome annealing() {
  Outcome o;
  const double s0 = 50.0, tau = 50.0 / 6.0;
  o.check(anneal_weight(s0, s0, tau) == 0.5, "gamma(s0) == 0.5 exactly");
  double prev = -1.0;
  bool monotone = true;
  for (int s = 0; s < 10000; ++s) {
    const double g = anneal_weight(s, s0, tau);
    if (g < prev) monotone = false;
    prev = g;
  }
  o.check(monotone, "monotone over 1e4 steps");
  const double sat = anneal_weight(s0 + 10 * tau, s0, tau);
  o.check(sat > 0.999, "gamma > 0.999 at s0 + 10 tau");
  o.detail << "gamma(s0)=" << anneal_weight(s0, s0, tau) << ", gamma(s0+10tau)=" << std::setprecision(8) << sat;
  return o;
}

// ---- 5 ------------------------------------------------------------------------

Outcome overfit_fixture() {
  Outcome o;
  const auto start = Clock::now();
  const Corpus corpus = load_corpus(fixture("overfit"));
  const RunConfig config;  // defaults
  const FitResult fitted = fit(corpus, config);
  std::size_t exact = 0;
  double bleu = 0.0;
  for (const auto& ex : corpus.train) {
    const PreparedExample prepared = fitted.model.prepare(ex);
    const Generation g = fitted.model.greedy(prepared, config.train.max_len);
    if (g.tokens == prepared.reference) ++exact;
    bleu += sentence_bleu(g.tokens, prepared.reference);
  }
  const double n = static_cast<double>(corpus.train.size());
  const double elapsed = seconds_since(start);
  o.check(corpus.train.size() == 50, "50 training examples");
  o.check(fitted.model.encoder_vocab().size() <= 200, "vocab <= 200");
  o.check(fitted.metrics.size() <= 500, "<= 500 epochs");
  o.check(exact >= 0.9 * n, "exact match >= 90%");
  o.check(bleu / n >= 0.90, "mean sentence BLEU >= 0.90");
  o.check(elapsed < 600.0, "runtime < 10 min");
  o.detail << "exact " << exact << "/" << corpus.train.size() << ", mean BLEU " << std::setprecision(4) << bleu / n
           << ", epochs " << fitted.metrics.size() << ", encoder vocab " << fitted.model.encoder_vocab().size()
           << ", " << std::fixed << std::setprecision(1) << elapsed << " s";
  return o;
}

// ---- 6 ------------------------------------------------------------------------

struct ToyMarkov {
  // Token 0 is the start symbol, 2 is EOS. Rows: previous token.
  std::vector<std::vector<double>> log_p;
  int start() const { return 0; }
  std::pair<int, std::vector<double>> step(int, TokenId input) const { return {0, log_p[static_cast<std::size_t>(input)]}; }
};

Outcome decoding_identities() {
  Outcome o;
  std::size_t models = 0, greedy_equal = 0, beam_dominates = 0;
  double worst_gap = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    std::mt19937_64 rng(seed);
    ModelConfig mc = small_config().model;
    mc.init_scale = 1.0 + static_cast<double>(seed % 5) * 0.5;
    const DefinitionModel model = random_model(seed, mc, 12);
    const PreparedExample ex = model.prepare(random_example(rng, 12));
    const Generation b1 = model.generate(ex, 1, 12);
    const Generation g = model.greedy(ex, 12);
    const Generation b5 = model.generate(ex, 5, 12);
    ++models;
    if (b1.ids == g.ids && b1.log_prob == g.log_prob) ++greedy_equal;
    if (b5.log_prob >= b1.log_prob) {
      ++beam_dominates;
    } else {
      worst_gap = std::max(worst_gap, b1.log_prob - b5.log_prob);
    }
  }
  o.check(greedy_equal == models, "beam=1 equals greedy on every model");
  o.check(beam_dominates == models, "beam=5 score >= beam=1 score on every model");

  auto l = [](double p) { return std::log(p); };
  // Greedy keeps choosing token 0 and never finishes; the best finished
  // sequence starts with the second-ranked token.
  const ToyMarkov model{{{l(0.6), l(0.35), l(0.05)}, {l(0.05), l(0.05), l(0.9)}, {l(0.1), l(0.1), l(0.8)}}};
  // Exhaustive search over every sequence of at most 4 generated tokens that ends in EOS.
  double best = -1e300;
  std::vector<TokenId> best_seq;
  std::function<void(std::vector<TokenId>&, TokenId, double)> rec = [&](std::vector<TokenId>& seq, TokenId last,
                                                                       double score) {
    for (TokenId t = 0; t < 3; ++t) {
      const double s = score + model.log_p[static_cast<std::size_t>(last)][static_cast<std::size_t>(t)];
      if (t == 2) {
        if (s > best) best = s, best_seq = seq;
      } else if (seq.size() + 1 < 4) {
        seq.push_back(t);
        rec(seq, t, s);
        seq.pop_back();
      }
    }
  };
  std::vector<TokenId> seq;
  rec(seq, 0, 0.0);
  const BeamResult beam2 = beam_search(model, 2, 4, 0, 2);
  const BeamResult greedy = greedy_decode(model, 4, 0, 2);
  o.check(beam2.finished && beam2.tokens == best_seq && std::abs(beam2.score - best) < 1e-12,
          "beam-2 equals exhaustive search on the toy model");
  o.detail << greedy_equal << "/" << models << " beam1==greedy, " << beam_dominates << "/" << models
           << " beam5>=beam1";
  if (worst_gap > 0.0) o.detail << " (worst shortfall " << worst_gap << ")";
  o.detail << "; toy exhaustive best " << best << ", beam-2 " << beam2.score << ", greedy " << greedy.score;
  return o;
}

// ---- 7 ------------------------------------------------------------------------

Outcome vcdm_cell_point() {
  Outcome o;
  ModelConfig mc = small_config().model;
  DefinitionModel model = random_model(3, mc);
  for (auto& p : model.parameters().entries()) {
    if (p.group == ParamGroup::decoder) {
      for (double& v : p.tensor.mutable_values()) v = 0.0;
    }
  }
  const Decoder& dec = model.decoder();
  const Tensor h = Tensor::zeros({mc.decoder_hidden});
  const DecoderState s0 = dec.initial_state(h);
  const DecoderState s1 = dec.cell_step(dec.embed(kBos), s0, h);
  const double expected = std::tanh(0.5) * 0.5;
  double worst = 0.0;
  for (double v : s1.hidden.values()) worst = std::max(worst, std::abs(v - expected));
  o.check(worst <= 1e-9, "s_j == tanh(0.5) * 0.5");
  o.detail << "expected " << std::setprecision(10) << expected << ", max deviation " << worst;
  return o;
}

// ---- 8 ------------------------------------------------------------------------

Outcome bleu_oracle() {
  Outcome o;
  struct Case {
    const char* hyp;
    const char* ref;
    double expected;  // hand n-gram counts
  };
  // The worked example multiplies out to (0.75 * 0.75 * 2/3 * 0.5)^(1/4) = 0.658037;
  // the 0.6223 printed next to those factors does not follow from them. All five
  // goldens agree with sacrebleu's add-k (k=1) sentence BLEU.
  const Case cases[] = {
      {"the cat sat on the mat", "the cat sat on the mat", 1.0},
      {"a b c", "x y z w", 0.0},
      {"a b c d", "a b c e", 0.6580370065},
      {"a b c", "a b c d e", 0.5134171190},
      {"the the the the", "the cat", 0.3194715521},
  };
  for (const auto& c : cases) {
    const double got = sentence_bleu(tokenize(c.hyp), tokenize(c.ref));
    o.detail << "'" << c.hyp << "': " << std::setprecision(6) << got << " ";
    o.check(std::abs(got - c.expected) < 1e-4, std::string("case '") + c.hyp + "'");
  }
  o.detail << "(worked example printed as 0.6223, which its own factors contradict; golden is 0.658037)";
  return o;
}

// ---- 9 ------------------------------------------------------------------------

Outcome aggregation_inflation() {
  Outcome o;
  std::vector<ScoredOutput> outs{{"0", {}, {"x"}, "A", 1.0}, {"1", {}, {"x"}, "B", 0.0}, {"2", {}, {"x"}, "B", 0.0}};
  const EvalReport r = corpus_eval(outs, Aggregation::sense_wise);
  o.check(std::abs(r.bleu_example_wise - 1.0 / 3.0) < 1e-15, "example_wise = 1/3");
  o.check(r.bleu_sense_wise && *r.bleu_sense_wise == 0.5, "sense_wise = 0.5");
  o.check(r.bleu_sense_wise && *r.bleu_sense_wise > r.bleu_example_wise, "sense_wise > example_wise");
  o.detail << "example_wise " << std::fixed << std::setprecision(4) << r.bleu_example_wise << ", sense_wise "
           << r.bleu_sense_wise.value_or(-1);
  return o;
}

// ---- 10 -----------------------------------------------------------------------

Outcome significance_tests() {
  Outcome o;
  std::vector<double> a(100), b(100);
  for (int i = 0; i < 100; ++i) {
    a[i] = static_cast<double>((i * 37) % 100) / 100.0;
    b[i] = i % 2 == 0 ? a[i] - 0.5 : a[i] + 0.4;
  }
  o.check(bootstrap_test(a, a) == 1.0, "identical lists give p = 1");
  std::vector<double> lower(a);
  for (auto& v : lower) v -= 0.01;
  o.check(bootstrap_test(a, lower) == 0.0, "strict domination gives p = 0");
  const double p1 = bootstrap_test(a, b, 10000, 2);
  const double p2 = bootstrap_test(a, b, 10000, 2);
  o.check(p1 == p2, "seeded bootstrap reproducible");
  // Golden value from an independent MT19937 stream (numpy) with the same index rule.
  o.check(p1 == 0.1346, "matches independent golden 0.1346");
  std::vector<double> x{0.2, 0.9, 0.4, 0.7}, y{0.3, 0.8, 0.5, 0.6};
  const double t = paired_t_test(x, y).p_value;
  o.check(std::abs(t - 1.0) <= 1e-12, "antisymmetric t-test p = 1");
  o.detail << "bootstrap p " << p1 << " (twice), t-test antisymmetric p " << std::setprecision(15) << t;
  return o;
}

// ---- 11 -----------------------------------------------------------------------

bool params_equal(const ParameterStore& a, const ParameterStore& b, ParamGroup group) {
  for (std::size_t i = 0; i < a.entries().size(); ++i) {
    if (a.entries()[i].group != group) continue;
    auto x = a.entries()[i].tensor.values();
    auto y = b.entries()[i].tensor.values();
    if (!std::equal(x.begin(), x.end(), y.begin(), y.end())) return false;
  }
  return true;
}

Outcome ablation_machinery() {
  Outcome o;
  const Corpus corpus = load_corpus(fixture("overfit"));
  struct Mode {
    const char* name;
    bool ctx, def, both;
  };
  for (const Mode m : {Mode{"freeze_context_encoder", true, false, false},
                       Mode{"freeze_definition_encoder", false, true, false}, Mode{"freeze_both", false, false, true}}) {
    RunConfig config = small_config();
    config.train.batch_size = 8;
    config.train.freeze_context_encoder = m.ctx;
    config.train.freeze_definition_encoder = m.def;
    config.train.freeze_both = m.both;
    DefinitionModel model(config.model, build_encoder_vocab(corpus.train, config.model.encoder),
                          build_output_vocab(corpus.train, config.model.output_vocab_cap), 5);
    DefinitionModel before(config.model, model.encoder_vocab(), model.output_vocab(), 5);
    std::vector<PreparedExample> batch;
    for (std::size_t i = 0; i < 8; ++i) batch.push_back(model.prepare(corpus.train[i]));
    const Objective obj = Objective::from(config.train, 1, config.model.latent_dim);
    AdamState state;
    for (std::size_t s = 0; s < 10; ++s) train_step(model, state, config, batch, obj, s);
    const bool ctx_same = params_equal(model.parameters(), before.parameters(), ParamGroup::context_encoder);
    const bool def_same = params_equal(model.parameters(), before.parameters(), ParamGroup::definition_encoder);
    const bool dec_same = params_equal(model.parameters(), before.parameters(), ParamGroup::decoder);
    o.check(ctx_same == (m.ctx || m.both), std::string(m.name) + ": context encoder");
    o.check(def_same == (m.def || m.both), std::string(m.name) + ": definition encoder");
    o.check(!dec_same, std::string(m.name) + ": decoder still trains");
  }

  {
    RunConfig config = small_config();
    config.model.tied_encoders = true;
    config.train.batch_size = 8;
    DefinitionModel model(config.model, build_encoder_vocab(corpus.train, config.model.encoder),
                          build_output_vocab(corpus.train, config.model.output_vocab_cap), 5);
    std::vector<PreparedExample> batch;
    for (std::size_t i = 0; i < 8; ++i) batch.push_back(model.prepare(corpus.train[i]));
    const Objective obj = Objective::from(config.train, 1, config.model.latent_dim);
    AdamState state;
    bool shared = true;
    for (std::size_t s = 0; s < 10; ++s) {
      train_step(model, state, config, batch, obj, s);
      shared = shared && &model.definition_encoder() == &model.context_encoder();
      // r_d from the shared encoder equals a context-encoder pass on the definition.
      NoGradGuard guard;
      const Tensor r_d = model.encode_definition(batch[0]);
      const Tensor direct = row(model.context_encoder().encode(batch[0].definition_ids), 0);
      shared = shared && std::equal(r_d.values().begin(), r_d.values().end(), direct.values().begin());
    }
    bool no_def_params = true;
    for (const auto& p : model.parameters().entries()) no_def_params = no_def_params && p.group != ParamGroup::definition_encoder;
    o.check(shared && no_def_params, "tied encoders share one parameter set");
  }

  {
    RunConfig printed = load_config(source_dir() / "configs" / "tiny.conf");
    RunConfig standard = printed;
    standard.model.standard_lstm_cell = true;
    const DefinitionModel a(printed.model, synthetic_gradcheck_vocab(), synthetic_gradcheck_vocab(), 1);
    const DefinitionModel b(standard.model, synthetic_gradcheck_vocab(), synthetic_gradcheck_vocab(), 1);
    const PreparedExample ex = a.prepare(synthetic_gradcheck_example());
    const GradCheckReport r = check_model_gradients(standard, {});
    NoGradGuard guard;
    auto distribution = [&](const DefinitionModel& m) {
      const ContextEncoding enc = m.encode_context(ex);
      const Tensor h = m.project_latent(prior_mean_latent(m.prior(enc.target)));
      const TeacherForcedScore s = m.decoder().score_teacher_forced(enc, h, ex.target_ids);
      return s.per_token;
    };
    o.check(distribution(a) != distribution(b), "standard cell changes decoder outputs");
    o.check(r.max_relative_error < 1e-4, "standard cell passes gradcheck");
    o.detail << "standard-cell gradcheck " << r.max_relative_error << "; ";
  }
  o.detail << "3 freeze modes x 10 Adam steps, tied mode 10 steps";
  return o;
}

// ---- 12 -----------------------------------------------------------------------

Outcome determinism() {
  Outcome o;
  const auto a = scratch("det_a"), b = scratch("det_b");
  const std::string data = fixture("tiny").string();
  const int ra = cli_process("train --data " + data + " --out " + a.string() + " --seed 3");
  const int rb = cli_process("train --data " + data + " --out " + b.string() + " --seed 3");
  o.check(ra == 0 && rb == 0, "both runs succeed");
  for (const char* f : {"metrics.jsonl", "model.ckpt", "last.ckpt", "encoder_vocab.txt", "output_vocab.txt"}) {
    const std::string x = read_file(a / f), y = read_file(b / f);
    o.check(!x.empty() && x == y, std::string(f) + " byte-identical");
  }
  o.detail << "tiny fixture, default config, seed 3, two complete runs; metrics.jsonl "
           << read_file(a / "metrics.jsonl").size() << " bytes, model.ckpt " << read_file(a / "model.ckpt").size()
           << " bytes";
  return o;
}

// ---- 13 -----------------------------------------------------------------------

Outcome checkpoint_round_trip() {
  Outcome o;
  const auto dir = scratch("ckpt");
  RunConfig config = small_config();
  const DefinitionModel m = random_model(9, config.model, 15);
  save_checkpoint(m, config, dir / "a.ckpt");
  const LoadedCheckpoint loaded = load_checkpoint(dir / "a.ckpt");
  save_checkpoint(loaded.model, loaded.config, dir / "b.ckpt");
  const std::string bytes = read_file(dir / "a.ckpt");
  o.check(bytes == read_file(dir / "b.ckpt"), "save -> load -> save byte-identical");

  std::string bumped = bytes;
  const std::uint32_t next = kCheckpointVersion + 1;
  std::memcpy(bumped.data() + 8, &next, sizeof next);
  write_file(dir / "bumped.ckpt", bumped);
  bool version_error = false;
  try {
    load_checkpoint(dir / "bumped.ckpt");
  } catch (const VersionError& e) {
    version_error = std::string(e.what()).find(std::to_string(next)) != std::string::npos;
  }
  o.check(version_error, "bumped version raises a version error naming it");
  write_file(dir / "in.jsonl", "{\"phrase\": \"w1\", \"context\": \"w2 w1 w3\"}\n");
  const int code = cli_process("generate --model " + (dir / "bumped.ckpt").string() + " --input " +
                               (dir / "in.jsonl").string() + " --out " + (dir / "out.jsonl").string());
  o.check(code == 1, "cli exit 1 on bumped version");
  o.detail << bytes.size() << " byte checkpoint; bumped-version generate exit " << code;
  return o;
}

}  // namespace

int main() {
  logging::set_level(logging::Level::error);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gradient correctness", gradient_correctness},
      {"KL properties", kl_properties},
      {"free-bits floor", free_bits_floor},
      {"annealing", annealing},
      {"overfit fixture", overfit_fixture},
      {"decoding identities", decoding_identities},
      {"VCDM cell analytic point", vcdm_cell_point},
      {"BLEU oracle", bleu_oracle},
      {"aggregation inflation", aggregation_inflation},
      {"significance tests", significance_tests},
      {"ablation machinery", ablation_machinery},
      {"determinism", determinism},
      {"checkpoint round trip", checkpoint_round_trip},
  };
  const char* only = std::getenv("VCDM_ACCEPTANCE_ONLY");
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only && std::to_string(i + 1) != only) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": " << o.detail.str()
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
