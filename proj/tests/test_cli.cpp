#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>

#include "support.hpp"
#include "vcdm/checkpoint.hpp"
#include "vcdm/text.hpp"

using namespace vcdm;
namespace fs = std::filesystem;
using vcdm::testing::cli_path;
using vcdm::testing::fixture;
using vcdm::testing::read_file;
using vcdm::testing::scratch;
using vcdm::testing::source_dir;
using vcdm::testing::write_file;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args) {
  static int counter = 0;
  const fs::path capture = fs::temp_directory_path() / ("vcdm_cli_capture_" + std::to_string(counter++));
  const std::string cmd =
      "VCDM_LOG_LEVEL=error " + cli_path().string() + " " + args + " >" + capture.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  Run r{WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_file(capture)};
  fs::remove(capture);
  return r;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

fs::path golden(const char* name) { return source_dir() / "tests" / "golden" / name; }

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

// A short training run on the tiny fixture, shared by the generate tests.
const fs::path& trained_dir() {
  static const fs::path dir = [] {
    const fs::path d = scratch("cli_trained");
    write_file(d / "run.conf",
               "embedding_dim = 8\ncontext_hidden = 12\ndefinition_hidden = 12\nencoder_layers = 1\n"
               "latent_dim = 4\ndecoder_hidden = 10\ndecoder_embedding = 6\nmax_epochs = 3\n");
    const Run r = cli("train --data " + q(fixture("tiny")) + " --config " + q(d / "run.conf") + " --out " +
                      q(d / "out") + " --seed 4");
    REQUIRE(r.code == 0);
    return d;
  }();
  return dir;
}

void close_enough(const nlohmann::json& a, const nlohmann::json& b) {
  if (a.is_number() && b.is_number()) {
    CHECK(a.get<double>() == doctest::Approx(b.get<double>()).epsilon(1e-12));
  } else if (a.is_object() && b.is_object()) {
    CHECK(a.size() == b.size());
    for (auto it = b.begin(); it != b.end(); ++it) {
      REQUIRE_MESSAGE(a.contains(it.key()), it.key());
      close_enough(a.at(it.key()), it.value());
    }
  } else if (a.is_array() && b.is_array()) {
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) close_enough(a[i], b[i]);
  } else {
    CHECK(a == b);
  }
}

}  // namespace

TEST_CASE("train") {
  const fs::path& d = trained_dir();
  for (const char* f : {"model.ckpt", "last.ckpt", "metrics.jsonl", "encoder_vocab.txt", "output_vocab.txt"})
    CHECK(fs::exists(d / "out" / f));
  CHECK(lines(read_file(d / "out" / "metrics.jsonl")) == 3);

  const fs::path again = scratch("cli_train_again");
  CHECK(cli("train --data " + q(fixture("tiny")) + " --config " + q(d / "run.conf") + " --out " + q(again) +
            " --seed 4")
            .code == 0);
  CHECK(read_file(again / "metrics.jsonl") == read_file(d / "out" / "metrics.jsonl"));

  CHECK(cli("train --data /nonexistent/corpus --out " + q(again)).code == 2);
  CHECK(cli("train --data " + q(fixture("tiny")) + " --config /nonexistent.conf --out " + q(again)).code == 2);
  write_file(again / "bad.conf", "latent_dim = banana\n");
  CHECK(cli("train --data " + q(fixture("tiny")) + " --config " + q(again / "bad.conf") + " --out " + q(again)).code ==
        1);
  CHECK(cli("train --out " + q(again)).code == 1);
  CHECK(cli("no-such-command").code == 1);
}

TEST_CASE("generate") {
  const fs::path& d = trained_dir();
  const fs::path work = scratch("cli_generate");
  write_file(work / "input.jsonl",
             "{\"phrase\": \"bank\", \"context\": \"money at the bank .\"}\n"
             "{\"phrase\": \"shore\", \"context\": \"the shore was quiet .\"}\n"
             "{\"phrase\": \"coast\", \"context\": \"we walked the coast .\"}\n");
  const Run r = cli("generate --model " + q(d / "out" / "model.ckpt") + " --input " + q(work / "input.jsonl") +
                    " --out " + q(work / "gen.jsonl") + " --beam 1 --max-len 8");
  REQUIRE(r.code == 0);
  CHECK(lines(r.out) == 3);
  const std::string gen = read_file(work / "gen.jsonl");
  REQUIRE(lines(gen) == 3);

  const LoadedCheckpoint ckpt = load_checkpoint(d / "out" / "model.ckpt");
  const auto inputs = read_examples(work / "input.jsonl", false);
  std::istringstream rows(gen);
  std::string line;
  for (const auto& ex : inputs) {
    std::getline(rows, line);
    const auto j = nlohmann::json::parse(line);
    const Generation g = ckpt.model.greedy(ckpt.model.prepare(ex), 8);
    CHECK(j.at("phrase") == ex.phrase);
    CHECK(j.at("definition_generated") == detokenize(g.tokens));
    CHECK(j.at("log_prob").get<double>() == g.log_prob);
  }

  std::string bytes = read_file(d / "out" / "model.ckpt");
  bytes[0] = 'X';
  write_file(work / "corrupt.ckpt", bytes);
  CHECK(cli("generate --model " + q(work / "corrupt.ckpt") + " --input " + q(work / "input.jsonl") + " --out " +
            q(work / "x.jsonl"))
            .code == 1);
  CHECK(cli("generate --model " + q(work / "missing.ckpt") + " --input " + q(work / "input.jsonl") + " --out " +
            q(work / "x.jsonl"))
            .code == 2);
  CHECK(cli("generate --model " + q(d / "out" / "model.ckpt") + " --input " + q(work / "input.jsonl") + " --out " +
            q(work / "x.jsonl") + " --beam 0")
            .code == 1);
  CHECK(!fs::exists(work / "x.jsonl"));
}

TEST_CASE("evaluate") {
  const fs::path work = scratch("cli_evaluate");
  const Run same = cli("evaluate --hyp " + q(golden("eval_ref.jsonl")) + " --ref " + q(golden("eval_ref.jsonl")));
  CHECK(same.code == 0);
  CHECK(same.out.find("BLEU (example-wise): 100.00") != std::string::npos);

  const Run report = cli("evaluate --hyp " + q(golden("eval_hyp.jsonl")) + " --ref " + q(golden("eval_ref.jsonl")) +
                         " --aggregation sense_wise --format json --out " + q(work / "report.json"));
  REQUIRE(report.code == 0);
  const auto expected = nlohmann::json::parse(read_file(golden("eval_report.json")));
  close_enough(nlohmann::json::parse(report.out), expected);
  close_enough(nlohmann::json::parse(read_file(work / "report.json")), expected);

  const Run text = cli("evaluate --hyp " + q(golden("eval_hyp.jsonl")) + " --ref " + q(golden("eval_ref.jsonl")) +
                       " --aggregation sense_wise");
  CHECK(text.out == "examples: 3\nBLEU (example-wise): 33.33\nsenses: 2\nBLEU (sense-wise): 50.00\n");

  write_file(work / "nosense.jsonl", "{\"definition\": \"a b\"}\n{\"definition\": \"c d\"}\n{\"definition\": \"e\"}\n");
  CHECK(cli("evaluate --hyp " + q(golden("eval_hyp.jsonl")) + " --ref " + q(work / "nosense.jsonl") +
            " --aggregation sense_wise")
            .code == 1);
  write_file(work / "short.jsonl", "{\"definition\": \"a b\"}\n");
  CHECK(cli("evaluate --hyp " + q(golden("eval_hyp.jsonl")) + " --ref " + q(work / "short.jsonl")).code == 1);
  CHECK(cli("evaluate --hyp " + q(work / "missing.jsonl") + " --ref " + q(work / "short.jsonl")).code == 2);
  CHECK(cli("evaluate --hyp " + q(golden("eval_hyp.jsonl")) + " --ref " + q(golden("eval_ref.jsonl")) +
            " --aggregation corpus")
            .code == 1);
}

TEST_CASE("stats") {
  const Run table = cli("stats --data " + q(fixture("overfit")));
  CHECK(table.code == 0);
  CHECK(table.out == read_file(golden("overfit_stats.txt")));

  const Run json = cli("stats --data " + q(fixture("tiny")) + " --format json");
  CHECK(json.code == 0);
  CHECK(nlohmann::json::parse(json.out) == nlohmann::json::parse(read_file(golden("tiny_stats.json"))));

  const fs::path work = scratch("cli_stats");
  fs::copy(fixture("tiny") / "train.jsonl", work / "train.jsonl");
  fs::copy(fixture("tiny") / "valid.jsonl", work / "valid.jsonl");
  write_file(work / "test.jsonl", "");
  const Run empty = cli("stats --data " + q(work));
  CHECK(empty.code == 0);
  const auto test_row = empty.out.substr(empty.out.find("\nTest"));
  CHECK(test_row.substr(0, test_row.find('\n', 1)).find("(empty)") != std::string::npos);
  CHECK(cli("stats --data " + q(work / "nowhere")).code == 2);
}

TEST_CASE("gradcheck") {
  const std::string conf = q(source_dir() / "configs" / "tiny.conf");
  const Run ok = cli("gradcheck --config " + conf);
  CHECK(ok.code == 0);
  CHECK(ok.out.rfind("PASS", 0) == 0);
  const auto j = nlohmann::json::parse(ok.out.substr(ok.out.find('\n') + 1));
  CHECK(j.at("pass") == true);
  CHECK(j.at("max_relative_error").get<double>() < 1e-4);

  const Run fault = cli("gradcheck --config " + conf + " --inject-fault");
  CHECK(fault.code == 1);
  CHECK(fault.out.rfind("FAIL", 0) == 0);
  CHECK(cli("gradcheck --config " + conf + " --eps 0").code == 1);
}

TEST_CASE("significance") {
  const fs::path work = scratch("cli_significance");
  std::string a, b, hi, lo, c, d;
  for (int i = 0; i < 20; ++i) {
    a += std::to_string(0.05 * i) + "\n";
    hi += "0.9\n";
    lo += "0.1\n";
    c += "0.5\n";
    d += "0.25\n";
  }
  write_file(work / "a.txt", a);
  write_file(work / "hi.txt", hi);
  write_file(work / "lo.txt", lo);
  write_file(work / "c.txt", c);
  write_file(work / "d.txt", d);
  write_file(work / "short.txt", "0.5\n");
  auto last_json = [](const std::string& out) {
    const auto pos = out.rfind('{');
    return nlohmann::json::parse(out.substr(pos));
  };

  const Run same = cli("significance --scores-a " + q(work / "a.txt") + " --scores-b " + q(work / "a.txt"));
  CHECK(same.code == 0);
  CHECK(last_json(same.out).at("bootstrap_p") == 1.0);
  const Run dom = cli("significance --scores-a " + q(work / "hi.txt") + " --scores-b " + q(work / "lo.txt") +
                      " --samples 500");
  CHECK(dom.code == 0);
  CHECK(last_json(dom.out).at("bootstrap_p") == 0.0);
  CHECK(cli("significance --scores-a " + q(work / "c.txt") + " --scores-b " + q(work / "d.txt") + " --method ttest")
            .code == 1);
  const Run t = cli("significance --scores-a " + q(work / "a.txt") + " --scores-b " + q(work / "c.txt") +
                    " --method ttest");
  CHECK(t.code == 0);
  CHECK(last_json(t.out).contains("ttest_p"));
  CHECK(cli("significance --scores-a " + q(work / "a.txt") + " --scores-b " + q(work / "short.txt")).code == 1);
  CHECK(cli("significance --scores-a " + q(work / "nope.txt") + " --scores-b " + q(work / "a.txt")).code == 2);
}
