#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include "dmsem/cli.hpp"
#include "support/temp_dir.hpp"

using namespace dmsem;
namespace fs = std::filesystem;

namespace {

const std::string kData = DMSEM_DATA_DIR;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = io::read_file(e.path());
  return files;
}

std::vector<std::string> train_args(const fs::path& dir, const std::string& variant = "ms_word2dm") {
  return {"train", "--corpus", kData + "/toy_corpus.txt", "--out", (dir / "model").string(), "--variant", variant,
          "--dim", "8", "--senses", "3", "--epochs", "2", "--subsample", "1e-3", "--seed", "11"};
}

}  // namespace

TEST(ParseInvocation, TrainPlan) {
  const auto p = cli::parse_invocation({"train", "--variant", "ms_word2dm", "--senses", "10", "--metric", "euclidean",
                                        "--dim", "50", "--corpus", "c.txt", "--out", "m/"});
  EXPECT_EQ(p.command, "train");
  EXPECT_EQ(p.train.variant, Variant::ms_word2dm);
  EXPECT_EQ(p.train.senses, 10);
  EXPECT_EQ(p.train.metric, SenseMetric::euclidean);
  EXPECT_EQ(p.train.dim, 50);
  EXPECT_EQ(p.train.threads, 1);
  EXPECT_EQ(p.inputs(), std::vector<std::string>{"c.txt"});
}

TEST(ParseInvocation, OperatorSideConflicts) {
  EXPECT_THROW(cli::parse_invocation({"compose", "--method", "add", "--operator-side", "noun", "--model", "m",
                                      "--fragment", "x/verb"}),
               UsageError);
  EXPECT_THROW(cli::parse_invocation({"eval", "--dataset", "t", "--model", "m", "--operator-side", "verb", "--report",
                                      "r"}),
               UsageError);
  EXPECT_THROW(cli::parse_invocation({"eval", "--dataset", "t", "--model", "m", "--vectors", "v", "--report", "r"}),
               UsageError);
}

TEST(ParseInvocation, FuzzNounEvalPlan) {
  const auto p = cli::parse_invocation({"eval", "--dataset", "t.jsonl", "--model", "m/", "--method", "fuzz",
                                        "--operator-side", "noun", "--sim", "trace", "--report", "r.json"});
  EXPECT_EQ(p.command, "eval");
  EXPECT_EQ(p.compose.method, ComposeMethod::fuzz);
  EXPECT_EQ(p.compose.operator_side, OperatorSide::noun);
  EXPECT_FALSE(p.compose.include_function_words);
  EXPECT_EQ(p.sim, SimMode::trace);
  EXPECT_EQ(p.dataset, "t.jsonl");
  EXPECT_EQ(p.report, "r.json");
  EXPECT_EQ(p.model_id, "m/");
}

TEST(Cli, HelpForEverySubcommand) {
  const std::map<std::string, std::vector<std::string>> flags{
      {"vocab", {"--corpus", "--min-count", "--out"}},
      {"train", {"--variant", "--dim", "--senses", "--metric", "--seed", "--threads", "--dtype", "--context-mode"}},
      {"context2dm", {"--vectors", "--k-min", "--k-max", "--linkage", "--per-occurrence"}},
      {"contextual2dm", {"--instances", "--method", "--dim"}},
      {"compose", {"--fragment", "--method", "--operator-side", "--lexicon"}},
      {"eval", {"--dataset", "--model", "--vectors", "--scores", "--sim", "--report", "--csv"}},
      {"entropy", {"--methods", "--include-function-words"}},
      {"inspect", {"--model", "--word"}}};
  for (const auto& [cmd, expected] : flags) {
    const auto r = invoke({cmd, "--help"});
    EXPECT_EQ(r.code, 0) << cmd;
    for (const auto& f : expected) EXPECT_NE(r.out.find(f), std::string::npos) << cmd << " " << f;
  }
  EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(invoke({}).code, 1);
  EXPECT_EQ(invoke({"frobnicate"}).code, 1);
  EXPECT_EQ(invoke({"vocab", "--corpus", "c", "--out", "v", "--bogus"}).code, 1);
  EXPECT_EQ(invoke({"vocab", "--corpus", "c"}).code, 1);
  EXPECT_EQ(invoke({"train", "--corpus", "c", "--out", "m", "--variant", "glove"}).code, 1);
  EXPECT_EQ(invoke({"train", "--corpus", "c", "--out", "m", "--lr", "0.1", "--lr-min", "0.5"}).code, 1);
  const auto r = invoke({"compose", "--method", "add", "--operator-side", "noun", "--model", "m", "--fragment", "x/verb"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("--operator-side"), std::string::npos);
}

TEST(Cli, MissingInputsExitTwo) {
  test_support::TempDir tmp;
  const auto r = invoke({"vocab", "--corpus", (tmp.path() / "nope.txt").string(), "--out", (tmp.path() / "v").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("nope.txt"), std::string::npos);
  EXPECT_FALSE(fs::exists(tmp.path() / "v"));
}

TEST(Cli, ToyPipeline) {
  test_support::TempDir tmp;
  const fs::path& d = tmp.path();
  const std::string model = (d / "model").string();
  ASSERT_EQ(invoke({"vocab", "--corpus", kData + "/toy_corpus.txt", "--out", (d / "vocab.tsv").string()}).code, 0);
  auto t = invoke(train_args(d));
  ASSERT_EQ(t.code, 0) << t.err;
  for (const char* f : {"vocab.tsv", "config.json", "senses.json", "densities.json"}) EXPECT_TRUE(fs::exists(d / "model" / f)) << f;

  const auto e = invoke({"eval", "--dataset", kData + "/toy_triples.jsonl", "--model", model, "--method", "phaser",
                         "--operator-side", "noun", "--report", (d / "r.json").string(), "--csv", (d / "r.csv").string()});
  ASSERT_EQ(e.code, 0) << e.err;
  const auto report = nlohmann::json::parse(io::read_file(d / "r.json"));
  ASSERT_EQ(report["reports"].size(), 2u);
  const auto& short_form = report["reports"][0];
  EXPECT_EQ(short_form["n_excluded"], 1);
  EXPECT_EQ(short_form["excluded"][0]["id"], "t12");
  EXPECT_EQ(short_form["excluded"][0]["reason"], "oov:bourse");
  EXPECT_EQ(short_form["n_pairs_used"], 14);
  EXPECT_TRUE(fs::exists(d / "r.csv"));

  const auto ent = invoke({"entropy", "--dataset", kData + "/toy_triples.jsonl", "--model", model, "--methods",
                           "fuzz_verb,phaser_verb", "--report", (d / "e.json").string()});
  ASSERT_EQ(ent.code, 0) << ent.err;
  const auto rows = nlohmann::json::parse(io::read_file(d / "e.json"))["rows"];
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0]["method"], "fuzz_verb");
  EXPECT_EQ(rows[1]["n_sentences"], 33);

  const auto c = invoke({"compose", "--model", model, "--fragment", "he/subj shower/verb present/obj", "--method",
                         "fuzz", "--lexicon", kData + "/lexicon.tsv", "--out", (d / "c.json").string()});
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_NE(c.out.find("SVO\tgrammatical\ts"), std::string::npos) << c.out;
  EXPECT_EQ(read_dm1(d / "c.json").size(), 1u);

  const auto i = invoke({"inspect", "--model", model, "--word", "shower"});
  ASSERT_EQ(i.code, 0) << i.err;
  EXPECT_EQ(i.out.rfind("shower\t", 0), 0u);
  EXPECT_EQ(invoke({"inspect", "--model", model, "--word", "bourse"}).code, 2);
  EXPECT_EQ(invoke({"compose", "--model", model, "--fragment", "bourse/subj crash/verb", "--method", "mult"}).code, 2);
}

TEST(Cli, VectorBaselineAndSenseInduction) {
  test_support::TempDir tmp;
  const fs::path& d = tmp.path();
  ASSERT_EQ(invoke(train_args(d, "sgns")).code, 0);
  const std::string vectors = (d / "model" / "vectors.txt").string();
  ASSERT_TRUE(fs::exists(vectors));
  EXPECT_EQ(invoke({"eval", "--dataset", kData + "/toy_triples.jsonl", "--model", (d / "model").string(), "--method",
                    "add", "--report", (d / "r.json").string()})
                .code,
            0);
  EXPECT_EQ(invoke({"eval", "--dataset", kData + "/toy_triples.jsonl", "--model", (d / "model").string(), "--method",
                    "fuzz", "--report", (d / "r.json").string()})
                .code,
            1);

  const auto c = invoke({"context2dm", "--corpus", kData + "/toy_corpus.txt", "--vectors", vectors, "--words",
                         "shower,give,sprinkle", "--out", (d / "c2dm").string()});
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_EQ(read_dm1(d / "c2dm" / "densities.json").size(), 3u);

  std::string jsonl;
  for (int i = 0; i < 6; ++i)
    jsonl += R"({"word":")" + std::string(i % 2 ? "bank" : "river") + R"(","vector":[)" + std::to_string(i) + ",1," +
             std::to_string(i * i % 5) + "]}\n";
  io::atomic_write(d / "inst.jsonl", jsonl);
  const auto x = invoke({"contextual2dm", "--instances", (d / "inst.jsonl").string(), "--dim", "2", "--out",
                         (d / "ctx").string()});
  ASSERT_EQ(x.code, 0) << x.err;
  EXPECT_EQ(read_dm1(d / "ctx" / "densities.json").dim(), 2);
}

TEST(Cli, PipelineIsByteDeterministic) {
  test_support::TempDir tmp;
  const fs::path& d = tmp.path();
  auto pipeline = [&] {
    fs::remove_all(d / "run");
    fs::create_directories(d / "run");
    const fs::path run = d / "run";
    EXPECT_EQ(invoke({"vocab", "--corpus", kData + "/toy_corpus.txt", "--out", (run / "vocab.tsv").string()}).code, 0);
    EXPECT_EQ(invoke(train_args(run)).code, 0);
    EXPECT_EQ(invoke({"eval", "--dataset", kData + "/toy_triples.jsonl", "--model", (run / "model").string(),
                      "--method", "mult", "--report", (run / "r.json").string(), "--csv", (run / "r.csv").string()})
                  .code,
              0);
    return snapshot(run);
  };
  const auto first = pipeline();
  const auto second = pipeline();
  EXPECT_EQ(first.size(), 9u);
  EXPECT_EQ(first, second);
}
