#include <gtest/gtest.h>

#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "cli.h"
#include "reliefir/corpus.h"
#include "reliefir/persist.h"
#include "synthetic.h"
#include "test_util.h"

namespace reliefir {
namespace {

using ::reliefir::testing::TempDir;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "reliefir");
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t count_lines(const std::string& path) {
  auto s = slurp(path);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream(path) << text;
}

class CliTest : public ::testing::Test {
 protected:
  TempDir dir;
  std::string f(const std::string& name) { return dir.file(name); }

  // A processed corpus of clustered tweets.
  std::string corpus(std::size_t n = 120) {
    auto path = f("corpus.jsonl");
    write_processed(path, testing::cluster_corpus(n, 4, 5, 3));
    return path;
  }

  std::vector<std::string> small_train(const std::string& kind, const std::string& out) {
    return {"train", "--corpus", corpus(), "--kind", kind, "--out", out, "--d-wrd", "8",
            "--d-chr", kind == "wcal" ? "4" : "8", "--epochs", "2", "--min-count", "1"};
  }
};

TEST_F(CliTest, PrepCountsAndIsIdempotent) {
  write_file(f("raw.jsonl"),
             "{\"id\":\"1\",\"text\":\"Need water in Kathmandu\"}\n"
             "{\"id\":\"2\",\"text\":\"Food packets available\"}\n"
             "{\"id\":\"3\",\"text\":\"Need water in Kathmandu\"}\n"
             "{\"id\":\"4\",\"text\":\"Doctors are being sent\"}\n"
             "{\"id\":\"5\",\"text\":\"Blankets required at camp\"}\n");
  auto r = run_cli({"prep", "--input", f("raw.jsonl"), "--out", f("p1.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "5 in, 4 retained\n");
  auto again = run_cli({"prep", "--input", f("p1.jsonl"), "--out", f("p2.jsonl")});
  ASSERT_EQ(again.code, 0) << again.err;
  EXPECT_EQ(again.out, "4 in, 4 retained\n");
  EXPECT_EQ(slurp(f("p1.jsonl")), slurp(f("p2.jsonl")));
  EXPECT_FALSE(slurp(f("p1.jsonl.meta")).empty());
}

TEST_F(CliTest, PrepMissingStopwordsNamesPath) {
  write_file(f("raw.tsv"), "1\thello\n");
  auto r = run_cli({"prep", "--input", f("raw.tsv"), "--format", "tsv", "--stopwords",
                    f("nope.txt"), "--out", f("p.jsonl")});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find(f("nope.txt")), std::string::npos) << r.err;
}

TEST_F(CliTest, PrepReportsMalformedInputAsDataError) {
  write_file(f("raw.jsonl"), "{\"id\":\"1\",\"text\":\"a\"}\n{broken\n");
  auto r = run_cli({"prep", "--input", f("raw.jsonl"), "--out", f("p.jsonl")});
  EXPECT_EQ(r.code, cli::kExitData);
  EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
}

TEST_F(CliTest, TrainIsByteDeterministicAndWritesSidecars) {
  auto args = small_train("w2v", f("a.bin"));
  args.insert(args.end(), {"--seed", "7"});
  ASSERT_EQ(run_cli(args).code, 0);
  args[6] = f("b.bin");
  ASSERT_EQ(run_cli(args).code, 0);
  EXPECT_EQ(slurp(f("a.bin")), slurp(f("b.bin")));
  EXPECT_EQ(count_lines(f("a.bin.log")), 3u);  // header + 2 epochs

  auto meta = nlohmann::json::parse(slurp(f("a.bin.meta")));
  EXPECT_EQ(meta["seed"], 7);
  EXPECT_EQ(meta["command"], "train");
  EXPECT_EQ(meta["config_hash"].get<std::string>().size(), 16u);
  EXPECT_EQ(meta["config"]["seed"], "7");
}

TEST_F(CliTest, TrainWcalLogsEveryEpoch) {
  auto r = run_cli(small_train("wcal", f("wcal.bin")));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("epoch 2:"), std::string::npos);
  EXPECT_EQ(load_model(f("wcal.bin")).kind(), ModelKind::kWcal);
}

TEST_F(CliTest, ZeroEpochsSavesTheInitialization) {
  auto args = small_train("wca", f("init.bin"));
  args[12] = "0";  // --epochs
  ASSERT_EQ(args[11], "--epochs");
  ASSERT_EQ(run_cli(args).code, 0);
  auto saved = load_model(f("init.bin"));
  auto corpus_data = read_processed(f("corpus.jsonl"));
  EmbeddingModel fresh(ModelKind::kWca, Vocabulary::build(corpus_data, 1), saved.config());
  for (const auto& [name, t] : fresh.params().tensors()) {
    auto a = t.values();
    auto b = saved.params().get(name).values();
    EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin())) << name;
  }
}

TEST_F(CliTest, ConfigErrorsExitWithOne) {
  auto args = small_train("bert", f("x.bin"));
  EXPECT_EQ(run_cli(args).code, cli::kExitUsage);
  auto dims = small_train("wc", f("x.bin"));
  dims[10] = "5";  // d_chr != d_wrd
  EXPECT_EQ(run_cli(dims).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"train"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"--help"}).code, cli::kExitOk);
}

TEST_F(CliTest, DivergenceExitsWithThree) {
  auto args = small_train("w2v", f("x.bin"));
  args.insert(args.end(), {"--lr-word", "1e300"});
  auto r = run_cli(args);
  EXPECT_EQ(r.code, cli::kExitNumeric) << r.err;
  EXPECT_NE(r.err.find("epoch"), std::string::npos) << r.err;
}

TEST_F(CliTest, SearchWritesOneLinePerTweetAndHonorsTopk) {
  ASSERT_EQ(run_cli(small_train("w2v", f("m.bin"))).code, 0);
  auto r = run_cli({"search", "--model", f("m.bin"), "--corpus", f("corpus.jsonl"), "--out",
                    f("run.txt"), "--query-label", "need", "--query-terms", "w0 w1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_lines(f("run.txt")), 120u);
  ASSERT_EQ(run_cli({"search", "--model", f("m.bin"), "--corpus", f("corpus.jsonl"), "--out",
                     f("top.txt"), "--query-terms", "w0 w1", "--topk", "7", "--threads", "3"})
                .code,
            0);
  EXPECT_EQ(count_lines(f("top.txt")), 7u);
  ASSERT_EQ(run_cli({"search", "--model", f("m.bin"), "--corpus", f("corpus.jsonl"), "--out",
                     f("top1.txt"), "--query-terms", "w0 w1", "--topk", "7"})
                .code,
            0);
  EXPECT_EQ(slurp(f("top.txt")), slurp(f("top1.txt")));
}

TEST_F(CliTest, SearchExpansionListsPlantedTermFirst) {
  // Hand-set vectors: "plant" is collinear with the query term "need".
  auto vocab = Vocabulary::from_entries(
      {{"need", 5}, {"plant", 4}, {"side", 3}, {"other", 2}}, {}, 1);
  TrainingConfig cfg;
  cfg.d_wrd = 3;
  EmbeddingModel m(ModelKind::kW2v, vocab, cfg);
  auto& w = m.params().get("word");
  auto set = [&](const char* term, std::initializer_list<double> v) {
    std::copy(v.begin(), v.end(), w.row(*vocab.word_index(term)).begin());
  };
  set("need", {1, 0, 0});
  set("plant", {2, 0, 0});
  set("side", {0.5, 0.5, 0});
  set("other", {0, 0, 1});
  save_model(m, f("planted.bin"));
  write_processed(f("planted.jsonl"), {testing::make_tweet("a", {"need", "other", "side"}),
                                       testing::make_tweet("b", {"need", "plant"}),
                                       testing::make_tweet("c", {"other"})});
  auto r = run_cli({"search", "--model", f("planted.bin"), "--corpus", f("planted.jsonl"), "--out",
                    f("run.txt"), "--query-label", "need", "--query-terms", "need", "--expand"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto expansion = slurp(f("run.txt.expansion"));
  EXPECT_EQ(expansion.rfind("need\tplant ", 0), 0u) << expansion;
}

TEST_F(CliTest, BaselinesAndEval) {
  write_processed(f("c.jsonl"), {testing::make_tweet("t1", {"need", "water"}, "Need water 20 bags"),
                                 testing::make_tweet("t2", {"food"}, "food here"),
                                 testing::make_tweet("t3", {"need", "food"}, "NEED food"),
                                 testing::make_tweet("t4", {"tent"}, "tents")});
  auto lm = run_cli({"baseline-lm", "--corpus", f("c.jsonl"), "--out", f("lm.txt"), "--query-label",
                     "need", "--rocchio", "--k", "2", "--p", "1"});
  ASSERT_EQ(lm.code, 0) << lm.err;
  EXPECT_EQ(count_lines(f("lm.txt")), 4u);
  EXPECT_EQ(count_lines(f("lm.txt.expansion")), 1u);

  write_file(f("p.txt"), "need\n{Number} bags\tquantity\n");
  auto p1 = run_cli({"baseline-patterns", "--corpus", f("c.jsonl"), "--patterns", f("p.txt"),
                     "--cap", "1", "--out", f("pat1.txt")});
  auto p2 = run_cli({"baseline-patterns", "--corpus", f("c.jsonl"), "--patterns", f("p.txt"),
                     "--cap", "1", "--out", f("pat2.txt")});
  ASSERT_EQ(p1.code, 0) << p1.err;
  EXPECT_EQ(slurp(f("pat1.txt")), slurp(f("pat2.txt")));
  EXPECT_EQ(count_lines(f("pat1.txt")), 1u);
  EXPECT_NE(p1.out.find("seed 42"), std::string::npos);

  write_file(f("bad.pat"), "ok\n[unclosed\n");
  auto bad = run_cli({"baseline-patterns", "--corpus", f("c.jsonl"), "--patterns", f("bad.pat"),
                      "--out", f("x.txt")});
  EXPECT_EQ(bad.code, cli::kExitUsage);
  EXPECT_NE(bad.err.find(":2"), std::string::npos) << bad.err;

  write_file(f("run.txt"), "need Q0 r1 1 0.9 t\nneed Q0 x 2 0.8 t\nneed Q0 y 3 0.7 t\nneed Q0 r2 4 0.6 t\n");
  write_file(f("qrels.txt"), "need 0 r1 1\nneed 0 r2 1\nneed 0 x 0\n");
  auto ev = run_cli({"eval", "--run", f("run.txt"), "--qrels", f("qrels.txt"), "--out", f("rep.txt")});
  ASSERT_EQ(ev.code, 0) << ev.err;
  EXPECT_NE(ev.out.find("0.7500"), std::string::npos) << ev.out;
  EXPECT_NE(slurp(f("rep.txt")).find("map\tneed\t0.7500"), std::string::npos);
  auto sets = run_cli({"eval", "--run", f("run.txt"), "--qrels", f("qrels.txt"), "--sets"});
  EXPECT_NE(sets.out.find("--"), std::string::npos) << sets.out;
}

TEST_F(CliTest, TransferProducesModelRunAndReport) {
  ASSERT_EQ(run_cli(small_train("w2v", f("src.bin"))).code, 0);
  write_processed(f("target.jsonl"), testing::cluster_corpus(80, 4, 5, 9, "w", 15, "v"));
  write_file(f("qrels.txt"), "need 0 w_t1 1\nneed 0 w_t5 1\n");
  for (const char* epochs : {"1", "5"}) {
    std::string tag = epochs;
    auto r = run_cli({"transfer", "--source", f("src.bin"), "--corpus", f("target.jsonl"),
                      "--epochs", epochs, "--out-model", f("t" + tag + ".bin"), "--out-run",
                      f("t" + tag + ".run"), "--qrels", f("qrels.txt"), "--query-label", "need",
                      "--query-terms", "w0 w1", "--kind", "w2v"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(std::filesystem::exists(f("t" + tag + ".bin")));
    EXPECT_EQ(count_lines(f("t" + tag + ".run")), 80u);
    EXPECT_NE(slurp(f("t" + tag + ".run.eval")).find("map\tneed"), std::string::npos);
    EXPECT_EQ(count_lines(f("t" + tag + ".bin.log")), 1u + std::stoul(tag));
  }
  auto wrong = run_cli({"transfer", "--source", f("src.bin"), "--corpus", f("target.jsonl"),
                        "--out-model", f("w.bin"), "--out-run", f("w.run"), "--kind", "wca"});
  EXPECT_EQ(wrong.code, cli::kExitUsage);
}

TEST_F(CliTest, ConfigFileFlagsWinAndDumpRoundTrips) {
  auto c = corpus();
  write_file(f("cfg.txt"), "# settings\nkind = w2v\nd_wrd = 8\nepochs = 1\nmin-count = 1\nseed = 5\n");
  auto r = run_cli({"train", "--config", f("cfg.txt"), "--corpus", c, "--out", f("m.bin"),
                    "--seed", "9", "--dump-config", f("dump1.txt")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto dump = slurp(f("dump1.txt"));
  EXPECT_NE(dump.find("seed=9\n"), std::string::npos) << dump;
  EXPECT_NE(dump.find("d-wrd=8\n"), std::string::npos) << dump;
  EXPECT_EQ(load_model(f("m.bin")).config().seed, 9u);

  auto meta_before = slurp(f("m.bin.meta"));
  auto r2 = run_cli({"train", "--config", f("dump1.txt"), "--dump-config", f("dump2.txt")});
  ASSERT_EQ(r2.code, 0) << r2.err;
  EXPECT_EQ(slurp(f("dump2.txt")), dump);
  // The rerun from the dumped settings rewrote m.bin under the same hash.
  EXPECT_EQ(slurp(f("m.bin.meta")), meta_before);

  write_file(f("bad.txt"), "no-such-option = 3\n");
  EXPECT_EQ(run_cli({"train", "--config", f("bad.txt"), "--corpus", c, "--kind", "w2v", "--out",
                     f("z.bin")})
                .code,
            cli::kExitUsage);
  EXPECT_EQ(run_cli({"train", "--config", f("missing.txt")}).code, cli::kExitUsage);
}

TEST_F(CliTest, ModelInspectAndCorruptModel) {
  ASSERT_EQ(run_cli(small_train("wc", f("m.bin"))).code, 0);
  auto r = run_cli({"model", "inspect", "--model", f("m.bin")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("kind\twc\n"), std::string::npos);
  auto bytes = slurp(f("m.bin"));
  bytes[bytes.size() / 2] ^= 1;
  std::ofstream(f("bad.bin"), std::ios::binary) << bytes;
  auto bad = run_cli({"model", "inspect", "--model", f("bad.bin")});
  EXPECT_EQ(bad.code, cli::kExitData);
  EXPECT_NE(bad.err.find("checksum"), std::string::npos);
}

}  // namespace
}  // namespace reliefir
