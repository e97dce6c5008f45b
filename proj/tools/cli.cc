#include "cli.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "reliefir/baselines.h"
#include "reliefir/corpus.h"
#include "reliefir/errors.h"
#include "reliefir/eval.h"
#include "reliefir/models.h"
#include "reliefir/persist.h"
#include "reliefir/porter_stemmer.h"
#include "reliefir/retrieval.h"

namespace reliefir::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

// Config file lines "key = value" become "--key=value" arguments; keys
// also given on the command line are dropped so explicit flags win.
std::vector<std::string> read_config_args(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::vector<std::string> args;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';' || line[0] == '[') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    std::replace(key.begin(), key.end(), '_', '-');
    if (key == "config") throw ConfigError(path.string() + ": nested config is not supported");
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

std::vector<std::string> with_config(std::vector<std::string> args) {
  std::optional<std::string> config;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) config = args[i].substr(9);
  }
  if (!config) return args;
  std::size_t insert_at = 1;
  while (insert_at < args.size() && !args[insert_at].empty() && args[insert_at][0] != '-')
    ++insert_at;
  std::set<std::string> explicit_keys;
  for (std::size_t i = 1; i < args.size(); ++i)
    if (args[i].rfind("--", 0) == 0) explicit_keys.insert(args[i].substr(0, args[i].find('=')));
  std::vector<std::string> extra;
  for (auto& a : read_config_args(*config))
    if (!explicit_keys.count(a.substr(0, a.find('=')))) extra.push_back(std::move(a));
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(insert_at), extra.begin(), extra.end());
  return args;
}

// The effective settings of one subcommand as sorted key=value lines.
std::string effective_config(const CLI::App& sub) {
  std::map<std::string, std::string> kv;
  for (const CLI::Option* opt : sub.get_options()) {
    std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config" || name == "dump-config") continue;
    std::string value;
    if (opt->get_type_size() == 0) {
      value = opt->count() && opt->as<bool>() ? "true" : "false";
    } else if (opt->count()) {
      for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
    } else {
      value = opt->get_default_str();
    }
    if (value.empty()) continue;
    kv[name] = value;
  }
  std::string text;
  for (const auto& [k, v] : kv) text += k + "=" + v + "\n";
  return text;
}

std::string hash_hex(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct RunInfo {
  std::string command;
  std::string config_text;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;

  void write_meta(const fs::path& file, std::uint64_t seed) const {
    json meta;
    meta["command"] = command;
    meta["config_hash"] = hash_hex(config_text);
    meta["seed"] = seed;
    json cfg = json::object();
    std::istringstream lines(config_text);
    for (std::string line; std::getline(lines, line);) {
      auto eq = line.find('=');
      cfg[line.substr(0, eq)] = line.substr(eq + 1);
    }
    meta["config"] = cfg;
    fs::path meta_path = file;
    meta_path += ".meta";
    std::ofstream f(meta_path);
    if (!f) throw DataError("cannot write " + meta_path.string());
    f << meta.dump(2) << '\n';
  }
};

// Options shared by several subcommands. Each subcommand binds the subset
// it needs; only one subcommand runs per invocation.
struct Options {
  std::string config;
  std::string dump_config;
  std::size_t threads = 1;

  std::string input;
  std::string format = "jsonl";
  std::string stopwords = default_stopwords_path().string();
  double dedup_threshold = 0.7;
  std::string out;

  std::string corpus;
  std::string kind;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> epochs, d_wrd, d_chr, window, min_count, char_window, attention_dim;
  std::optional<double> lr_word, lr_char, beta1, beta2, eps, lambda, grad_clip;
  std::optional<std::string> optimizer;

  std::string model;
  std::string query_label;
  std::string query_terms;
  bool expand = false;
  std::size_t k = 10;
  std::size_t p = 3;
  bool exclude_query_terms = true;
  std::size_t topk = 0;
  std::string tag = "reliefir";
  std::string expansion_out;

  double mu = 2500.0;
  bool rocchio = false;

  std::string patterns;
  std::string label = "need";
  std::size_t cap = 1000;
  std::uint64_t pattern_seed = kDefaultPatternSeed;

  std::string run;
  std::string qrels;
  bool sets = false;

  std::string source;
  std::size_t retrain_epochs = 1;
  std::string vocab_policy = "target-only";
  std::string out_model;
  std::string out_run;
  std::string out_report;
};

std::vector<Query> resolve_queries(const Options& o) {
  if (!o.query_terms.empty()) {
    auto terms = split_ws(o.query_terms);
    if (terms.empty()) throw ConfigError("--query-terms is empty");
    return {{o.query_label.empty() ? "custom" : o.query_label, terms}};
  }
  if (o.query_label == "need") return {need_query()};
  if (o.query_label == "avail") return {availability_query()};
  if (o.query_label.empty() || o.query_label == "all") return {need_query(), availability_query()};
  throw ConfigError("unknown query label '" + o.query_label + "' without --query-terms");
}

std::string expansion_path(const Options& o, const std::string& run_path) {
  return o.expansion_out.empty() ? run_path + ".expansion" : o.expansion_out;
}

void write_expansions(const fs::path& path, const std::vector<ExpansionResult>& expansions) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path.string());
  for (const auto& e : expansions) {
    f << e.query.label << '\t';
    for (std::size_t i = 0; i < e.added.size(); ++i) f << (i ? " " : "") << e.added[i];
    f << '\n';
  }
}

TrainingConfig training_config(const Options& o, ModelKind kind) {
  TrainingConfig c = default_config(kind);
  if (o.seed) c.seed = *o.seed;
  if (o.epochs) c.epochs = *o.epochs;
  if (o.d_wrd) c.d_wrd = *o.d_wrd;
  if (o.d_chr) c.d_chr = *o.d_chr;
  if (o.window) c.window = *o.window;
  if (o.min_count) c.min_count = *o.min_count;
  if (o.char_window) c.char_window = *o.char_window;
  if (o.attention_dim) c.attention_dim = *o.attention_dim;
  if (o.lr_word) c.lr_word = *o.lr_word;
  if (o.lr_char) c.lr_char = *o.lr_char;
  if (o.beta1) c.adam_beta1 = *o.beta1;
  if (o.beta2) c.adam_beta2 = *o.beta2;
  if (o.eps) c.adam_eps = *o.eps;
  if (o.lambda) c.fixed_lambda = *o.lambda;
  if (o.grad_clip) c.grad_clip = *o.grad_clip;
  if (o.optimizer) {
    if (*o.optimizer == "sgd")
      c.optimizer = OptimizerKind::kSgd;
    else if (*o.optimizer == "adam")
      c.optimizer = OptimizerKind::kAdam;
    else
      throw ConfigError("unknown optimizer '" + *o.optimizer + "' (sgd|adam)");
  }
  c.validate(kind);
  return c;
}

void write_loss_log(const fs::path& path, const std::vector<EpochStats>& log) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path.string());
  f << "epoch\tmean_loss\tpairs\tmean_char_loss\tchar_pairs\n";
  char buf[128];
  for (const auto& s : log) {
    std::snprintf(buf, sizeof(buf), "%zu\t%.6f\t%zu\t%.6f\t%zu\n", s.epoch, s.mean_loss, s.pairs,
                  s.mean_char_loss, s.char_pairs);
    f << buf;
  }
}

void print_epochs(std::ostream& out, const std::vector<EpochStats>& log) {
  char buf[128];
  for (const auto& s : log) {
    std::snprintf(buf, sizeof(buf), "epoch %zu: mean loss %.6f over %zu pairs\n", s.epoch,
                  s.mean_loss, s.pairs);
    out << buf;
  }
}

void cmd_prep(const Options& o, const RunInfo& info) {
  auto tweets = ingest(o.input, parse_input_format(o.format));
  auto stop = load_stopwords(o.stopwords);
  auto processed = preprocess_all(tweets, stop, porter_stem);
  DedupConfig dedup_cfg;
  dedup_cfg.jaccard_threshold = o.dedup_threshold;
  auto kept = dedup(processed, dedup_cfg);
  write_processed(o.out, kept);
  info.write_meta(o.out, 0);
  *info.out << tweets.size() << " in, " << kept.size() << " retained\n";
}

void search_into(const EmbeddingModel& model, const std::vector<ProcessedTweet>& corpus,
                 const Options& o, std::vector<RankedList>& runs,
                 std::vector<ExpansionResult>& expansions, std::ostream& err) {
  ExpansionConfig ecfg{o.k, o.p, o.exclude_query_terms};
  for (const auto& q : resolve_queries(o)) {
    RankedList list = rank(model, corpus, q, o.threads);
    if (o.expand) {
      auto e = expand_query_embedding(model, corpus, q, list, ecfg);
      for (const auto& w : e.warnings) err << "warning: " << w << '\n';
      list = rank(model, corpus, e.query, o.threads);
      list.query_label = q.label;
      expansions.push_back(std::move(e));
    }
    runs.push_back(o.topk ? list.truncated(o.topk) : std::move(list));
  }
}

void cmd_train(const Options& o, const RunInfo& info) {
  ModelKind kind = parse_model_kind(o.kind);
  TrainingConfig cfg = training_config(o, kind);
  auto corpus = read_processed(o.corpus);
  EmbeddingModel model(kind, Vocabulary::build(corpus, cfg.min_count), cfg);
  auto log = model.train(corpus);
  save_model(model, o.out);
  write_loss_log(o.out + ".log", log);
  info.write_meta(o.out, cfg.seed);
  print_epochs(*info.out, log);
  *info.out << "saved " << model_kind_name(kind) << " model (" << model.vocab().size()
            << " words, " << model.vocab().char_size() << " chars) to " << o.out << '\n';
}

void cmd_search(const Options& o, const RunInfo& info) {
  auto model = load_model(o.model);
  auto corpus = read_processed(o.corpus);
  std::vector<RankedList> runs;
  std::vector<ExpansionResult> expansions;
  search_into(model, corpus, o, runs, expansions, *info.err);
  write_run_file(o.out, runs, o.tag);
  info.write_meta(o.out, model.config().seed);
  if (o.expand) {
    auto path = expansion_path(o, o.out);
    write_expansions(path, expansions);
    info.write_meta(path, model.config().seed);
    for (const auto& e : expansions) {
      *info.out << "expanded " << e.query.label << ":";
      for (const auto& t : e.added) *info.out << ' ' << t;
      *info.out << '\n';
    }
  }
  *info.out << "wrote " << o.out << '\n';
}

void cmd_baseline_lm(const Options& o, const RunInfo& info) {
  auto corpus = read_processed(o.corpus);
  LmConfig lm{o.mu};
  RocchioConfig rc{o.k, o.p};
  std::vector<RankedList> runs;
  std::vector<ExpansionResult> expansions;
  for (const auto& q : resolve_queries(o)) {
    RankedList list = lm_rank(corpus, q, lm);
    if (o.rocchio) {
      auto e = rocchio_expand(corpus, q, list, rc);
      for (const auto& w : e.warnings) *info.err << "warning: " << w << '\n';
      list = lm_rank(corpus, e.query, lm);
      list.query_label = q.label;
      expansions.push_back(std::move(e));
    }
    runs.push_back(o.topk ? list.truncated(o.topk) : std::move(list));
  }
  write_run_file(o.out, runs, o.tag);
  info.write_meta(o.out, 0);
  if (o.rocchio) {
    auto path = expansion_path(o, o.out);
    write_expansions(path, expansions);
    info.write_meta(path, 0);
  }
  *info.out << "wrote " << o.out << '\n';
}

void cmd_baseline_patterns(const Options& o, const RunInfo& info) {
  auto corpus = read_processed(o.corpus);
  auto ps = PatternSet::load(o.patterns);
  auto ids = pattern_match(ps, corpus, o.cap, o.pattern_seed);
  write_run_file(o.out, {match_set_as_run(o.label, ids)}, o.tag);
  info.write_meta(o.out, o.pattern_seed);
  *info.out << ids.size() << " tweets selected with " << ps.patterns.size() << " patterns (seed "
            << o.pattern_seed << ")\n";
}

std::vector<EvalReport> evaluate_runs(const std::map<std::string, RankedList>& runs,
                                      const Qrels& qrels, bool sets) {
  std::vector<EvalReport> reports;
  for (const auto& [qid, list] : runs) {
    if (sets) {
      std::vector<std::string> ids;
      for (const auto& e : list.entries) ids.push_back(e.id);
      reports.push_back(evaluate_set(qid, ids, qrels));
    } else {
      reports.push_back(evaluate_ranked(list, qrels));
    }
  }
  return reports;
}

void write_report(const fs::path& path, const std::vector<EvalReport>& reports) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path.string());
  f << format_report_lines(reports);
}

void cmd_eval(const Options& o, const RunInfo& info) {
  auto reports = evaluate_runs(read_run_file(o.run), Qrels::load(o.qrels), o.sets);
  *info.out << format_report_table(reports);
  if (!o.out.empty()) {
    write_report(o.out, reports);
    info.write_meta(o.out, 0);
  }
}

void cmd_transfer(const Options& o, const RunInfo& info) {
  TransferPlan plan;
  plan.source = o.source;
  plan.target = read_processed(o.corpus);
  plan.retrain_epochs = o.retrain_epochs;
  plan.vocab_policy = parse_vocab_policy(o.vocab_policy);
  if (!o.kind.empty()) plan.expected_kind = parse_model_kind(o.kind);
  auto result = warm_start(plan);
  const auto seed = result.model.config().seed;
  save_model(result.model, o.out_model);
  write_loss_log(o.out_model + ".log", result.log);
  info.write_meta(o.out_model, seed);
  *info.out << "copied " << result.copied_words << " word rows and " << result.copied_chars
            << " char rows\n";
  print_epochs(*info.out, result.log);

  std::vector<RankedList> runs;
  std::vector<ExpansionResult> expansions;
  search_into(result.model, plan.target, o, runs, expansions, *info.err);
  write_run_file(o.out_run, runs, o.tag);
  info.write_meta(o.out_run, seed);
  if (o.expand) {
    auto path = expansion_path(o, o.out_run);
    write_expansions(path, expansions);
    info.write_meta(path, seed);
  }

  if (!o.qrels.empty()) {
    std::map<std::string, RankedList> by_label;
    for (auto& r : runs) by_label.emplace(r.query_label, r);
    auto reports = evaluate_runs(by_label, Qrels::load(o.qrels), false);
    std::string report_path = o.out_report.empty() ? o.out_run + ".eval" : o.out_report;
    write_report(report_path, reports);
    info.write_meta(report_path, seed);
    *info.out << format_report_table(reports);
  }
}

void cmd_inspect(const Options& o, const RunInfo& info) {
  *info.out << format_model_info(inspect_model(o.model));
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "key=value settings file; flags override it");
  sub->add_option("--dump-config", o.dump_config, "write the effective settings to this file");
  sub->add_option("--threads", o.threads, "scoring threads")->check(CLI::PositiveNumber);
}

void add_queries(CLI::App* sub, Options& o) {
  sub->add_option("--query-label", o.query_label, "need, avail, all, or a custom label");
  sub->add_option("--query-terms", o.query_terms, "stemmed query terms (custom query)");
  sub->add_option("--topk", o.topk, "keep this many results per query (0 = all)");
  sub->add_option("--tag", o.tag, "run tag column");
  sub->add_option("--k", o.k, "feedback tweets for expansion")->check(CLI::PositiveNumber);
  sub->add_option("--p", o.p, "expansion terms")->check(CLI::PositiveNumber);
  sub->add_option("--expansion-out", o.expansion_out, "expansion terms file");
}

int map_exception(std::ostream& err) {
  try {
    throw;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Embedding-based retrieval of resource tweets"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default()->multi_option_policy(
      CLI::MultiOptionPolicy::TakeLast);

  auto* prep = app.add_subcommand("prep", "ingest, preprocess and deduplicate tweets");
  add_common(prep, o);
  prep->add_option("--input", o.input, "raw tweets")->required()->check(CLI::ExistingFile);
  prep->add_option("--format", o.format, "jsonl or tsv");
  prep->add_option("--stopwords", o.stopwords, "stopword list")->check(CLI::ExistingFile);
  prep->add_option("--dedup-threshold", o.dedup_threshold, "Jaccard threshold");
  prep->add_option("--out", o.out, "processed corpus")->required();

  auto* train = app.add_subcommand("train", "train an embedding model");
  add_common(train, o);
  train->add_option("--corpus", o.corpus, "processed corpus")->required()->check(CLI::ExistingFile);
  train->add_option("--kind", o.kind, "w2v, wc, wcal, wca or wcind")->required();
  train->add_option("--out", o.out, "model file")->required();
  train->add_option("--seed", o.seed);
  train->add_option("--epochs", o.epochs);
  train->add_option("--d-wrd", o.d_wrd);
  train->add_option("--d-chr", o.d_chr);
  train->add_option("--window", o.window);
  train->add_option("--min-count", o.min_count);
  train->add_option("--char-window", o.char_window);
  train->add_option("--attention-dim", o.attention_dim);
  train->add_option("--lr-word", o.lr_word);
  train->add_option("--lr-char", o.lr_char);
  train->add_option("--optimizer", o.optimizer, "sgd or adam");
  train->add_option("--adam-beta1", o.beta1);
  train->add_option("--adam-beta2", o.beta2);
  train->add_option("--adam-eps", o.eps);
  train->add_option("--lambda", o.lambda, "fixed mixing weight (wcind)");
  train->add_option("--grad-clip", o.grad_clip);

  auto* search = app.add_subcommand("search", "rank a corpus with a trained model");
  add_common(search, o);
  search->add_option("--model", o.model)->required()->check(CLI::ExistingFile);
  search->add_option("--corpus", o.corpus)->required()->check(CLI::ExistingFile);
  search->add_option("--out", o.out, "run file")->required();
  search->add_flag("--expand", o.expand, "expand queries from the top tweets and re-rank");
  search->add_option("--exclude-query-terms", o.exclude_query_terms);
  add_queries(search, o);

  auto* lm = app.add_subcommand("baseline-lm", "query-likelihood ranking");
  add_common(lm, o);
  lm->add_option("--corpus", o.corpus)->required()->check(CLI::ExistingFile);
  lm->add_option("--out", o.out, "run file")->required();
  lm->add_option("--mu", o.mu, "Dirichlet prior")->check(CLI::PositiveNumber);
  lm->add_flag("--rocchio", o.rocchio, "Rocchio expansion and re-ranking");
  add_queries(lm, o);

  auto* pat = app.add_subcommand("baseline-patterns", "regular-expression matching");
  add_common(pat, o);
  pat->add_option("--corpus", o.corpus)->required()->check(CLI::ExistingFile);
  pat->add_option("--patterns", o.patterns)->required()->check(CLI::ExistingFile);
  pat->add_option("--label", o.label, "query label of the match set");
  pat->add_option("--cap", o.cap, "sample size limit");
  pat->add_option("--seed", o.pattern_seed, "sampling seed");
  pat->add_option("--tag", o.tag);
  pat->add_option("--out", o.out, "pseudo-run file")->required();

  auto* ev = app.add_subcommand("eval", "score a run file against qrels");
  add_common(ev, o);
  ev->add_option("--run", o.run)->required()->check(CLI::ExistingFile);
  ev->add_option("--qrels", o.qrels)->required()->check(CLI::ExistingFile);
  ev->add_flag("--sets", o.sets, "treat each query's entries as an unordered set");
  ev->add_option("--out", o.out, "measure/query/value report");

  auto* tr = app.add_subcommand("transfer", "warm-start from a saved model, retrain, search, eval");
  add_common(tr, o);
  tr->add_option("--source", o.source)->required()->check(CLI::ExistingFile);
  tr->add_option("--corpus", o.corpus, "target corpus")->required()->check(CLI::ExistingFile);
  tr->add_option("--epochs", o.retrain_epochs, "retraining epochs");
  tr->add_option("--vocab-policy", o.vocab_policy, "target-only or union");
  tr->add_option("--kind", o.kind, "expected source kind");
  tr->add_option("--out-model", o.out_model)->required();
  tr->add_option("--out-run", o.out_run)->required();
  tr->add_option("--qrels", o.qrels)->check(CLI::ExistingFile);
  tr->add_option("--out-report", o.out_report);
  tr->add_flag("--expand", o.expand);
  tr->add_option("--exclude-query-terms", o.exclude_query_terms);
  add_queries(tr, o);

  auto* model_cmd = app.add_subcommand("model", "model file utilities");
  model_cmd->require_subcommand(1);
  auto* inspect = model_cmd->add_subcommand("inspect", "print model header fields");
  inspect->add_option("--model", o.model)->required()->check(CLI::ExistingFile);

  std::vector<std::string> args;
  try {
    args = with_config(raw_args);
  } catch (...) {
    return map_exception(err);
  }
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const std::vector<std::pair<CLI::App*, void (*)(const Options&, const RunInfo&)>> commands = {
      {prep, cmd_prep},         {train, cmd_train},         {search, cmd_search},
      {lm, cmd_baseline_lm},    {pat, cmd_baseline_patterns}, {ev, cmd_eval},
      {tr, cmd_transfer},       {inspect, cmd_inspect}};
  try {
    for (const auto& [sub, fn] : commands) {
      if (!sub->parsed()) continue;
      RunInfo info{sub->get_name(), effective_config(*sub), &out, &err};
      if (!o.dump_config.empty()) {
        std::ofstream f(o.dump_config);
        if (!f) throw DataError("cannot write " + o.dump_config);
        f << info.config_text;
      }
      fn(o, info);
      return kExitOk;
    }
  } catch (...) {
    return map_exception(err);
  }
  return kExitUsage;
}

}  // namespace reliefir::cli
