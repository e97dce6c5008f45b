#include "reliefir/persist.h"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "reliefir/errors.h"

namespace reliefir {
namespace {

constexpr char kMagic[8] = {'R', 'L', 'F', 'I', 'R', 'M', 'D', 'L'};
static_assert(std::endian::native == std::endian::little,
              "model files are written with native little-endian stores");

class Writer {
 public:
  template <typename T>
  void put(T v) {
    char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    buf_.append(bytes, sizeof(T));
  }
  void put_string(const std::string& s) {
    put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    buf_.append(s);
  }
  void put_raw(const char* p, std::size_t n) { buf_.append(p, n); }
  std::string& buffer() { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  Reader(const std::string& buf, std::size_t end, std::string source)
      : buf_(buf), end_(end), source_(std::move(source)) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, buf_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string get_string() {
    auto n = get<std::uint32_t>();
    need(n);
    std::string s = buf_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == end_; }

 private:
  void need(std::size_t n) {
    if (end_ - pos_ < n) throw DataError(source_ + ": truncated model file");
  }
  const std::string& buf_;
  std::size_t pos_ = 0;
  std::size_t end_;
  std::string source_;
};

std::uint32_t crc_of(const char* p, std::size_t n) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(p), static_cast<uInt>(n)));
}

void write_config(Writer& w, const TrainingConfig& c) {
  w.put<std::uint64_t>(c.d_wrd);
  w.put<std::uint64_t>(c.d_chr);
  w.put<std::uint64_t>(c.window);
  w.put<double>(c.lr_word);
  w.put<double>(c.lr_char);
  w.put<std::uint32_t>(c.optimizer == OptimizerKind::kAdam ? 1 : 0);
  w.put<double>(c.adam_beta1);
  w.put<double>(c.adam_beta2);
  w.put<double>(c.adam_eps);
  w.put<std::uint64_t>(c.epochs);
  w.put<std::uint64_t>(c.seed);
  w.put<std::uint64_t>(c.min_count);
  w.put<std::uint64_t>(c.char_window);
  w.put<double>(c.fixed_lambda);
  w.put<std::uint64_t>(c.attention_dim);
  w.put<double>(c.grad_clip);
}

TrainingConfig read_config(Reader& r) {
  TrainingConfig c;
  c.d_wrd = r.get<std::uint64_t>();
  c.d_chr = r.get<std::uint64_t>();
  c.window = r.get<std::uint64_t>();
  c.lr_word = r.get<double>();
  c.lr_char = r.get<double>();
  c.optimizer = r.get<std::uint32_t>() == 1 ? OptimizerKind::kAdam : OptimizerKind::kSgd;
  c.adam_beta1 = r.get<double>();
  c.adam_beta2 = r.get<double>();
  c.adam_eps = r.get<double>();
  c.epochs = r.get<std::uint64_t>();
  c.seed = r.get<std::uint64_t>();
  c.min_count = r.get<std::uint64_t>();
  c.char_window = r.get<std::uint64_t>();
  c.fixed_lambda = r.get<double>();
  c.attention_dim = r.get<std::uint64_t>();
  c.grad_clip = r.get<double>();
  return c;
}

void write_entries(Writer& w, const std::vector<VocabEntry>& entries) {
  w.put<std::uint64_t>(entries.size());
  for (const auto& e : entries) {
    w.put_string(e.term);
    w.put<std::uint64_t>(e.count);
  }
}

std::vector<VocabEntry> read_entries(Reader& r) {
  auto n = r.get<std::uint64_t>();
  std::vector<VocabEntry> out;
  for (std::uint64_t i = 0; i < n; ++i) {
    VocabEntry e;
    e.term = r.get_string();
    e.count = r.get<std::uint64_t>();
    out.push_back(std::move(e));
  }
  return out;
}

struct RawTensor {
  std::vector<std::uint64_t> shape;
  std::vector<float> values;
};

struct Decoded {
  std::uint32_t version = 0;
  ModelKind kind = ModelKind::kW2v;
  TrainingConfig config;
  std::size_t min_count = 1;
  std::vector<VocabEntry> words, chars;
  std::map<std::string, RawTensor> tensors;
  std::vector<std::string> tensor_order;
  std::uint32_t checksum = 0;
};

Decoded decode(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file " + path.string());
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::string src = path.string();
  if (buf.size() < sizeof(kMagic) + 8 || std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0)
    throw DataError(src + ": not a model file (bad magic)");

  Decoded d;
  std::uint32_t version;
  std::memcpy(&version, buf.data() + sizeof(kMagic), sizeof(version));
  if (version != kModelFormatVersion)
    throw DataError(src + ": unsupported version " + std::to_string(version) + " (expected " +
                    std::to_string(kModelFormatVersion) + ")");

  const std::size_t body = buf.size() - sizeof(std::uint32_t);
  std::uint32_t stored;
  std::memcpy(&stored, buf.data() + body, sizeof(stored));
  if (crc_of(buf.data(), body) != stored) throw DataError(src + ": checksum mismatch");
  d.checksum = stored;

  Reader r(buf, body, src);
  r.get<std::uint64_t>();  // magic, already checked
  d.version = r.get<std::uint32_t>();
  auto kind = r.get<std::uint32_t>();
  if (kind > static_cast<std::uint32_t>(ModelKind::kWcind))
    throw DataError(src + ": unknown model kind " + std::to_string(kind));
  d.kind = static_cast<ModelKind>(kind);
  d.config = read_config(r);
  d.min_count = r.get<std::uint64_t>();
  d.words = read_entries(r);
  d.chars = read_entries(r);
  auto count = r.get<std::uint64_t>();
  for (std::uint64_t t = 0; t < count; ++t) {
    std::string name = r.get_string();
    RawTensor raw;
    auto ndim = r.get<std::uint32_t>();
    std::uint64_t elements = 1;
    for (std::uint32_t k = 0; k < ndim; ++k) {
      raw.shape.push_back(r.get<std::uint64_t>());
      elements *= raw.shape.back();
    }
    raw.values.resize(elements);
    for (auto& x : raw.values) x = r.get<float>();
    d.tensor_order.push_back(name);
    d.tensors.emplace(std::move(name), std::move(raw));
  }
  if (!r.done()) throw DataError(src + ": trailing bytes before checksum");
  return d;
}

void copy_rows(const ParamTensor& from, const Vocabulary& from_vocab, ParamTensor& to,
               const Vocabulary& to_vocab, bool chars, std::size_t& copied) {
  const auto& entries = chars ? to_vocab.chars() : to_vocab.words();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    auto j = chars ? from_vocab.char_index(entries[i].term) : from_vocab.word_index(entries[i].term);
    if (!j) continue;
    auto src = from.row(*j);
    auto dst = to.row(i);
    std::copy(src.begin(), src.end(), dst.begin());
    ++copied;
  }
}

}  // namespace

void save_model(const EmbeddingModel& model, const std::filesystem::path& path) {
  Writer w;
  w.put_raw(kMagic, sizeof(kMagic));
  w.put<std::uint32_t>(kModelFormatVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(model.kind()));
  write_config(w, model.config());
  w.put<std::uint64_t>(model.vocab().min_count());
  write_entries(w, model.vocab().words());
  write_entries(w, model.vocab().chars());
  const auto& tensors = model.params().tensors();
  w.put<std::uint64_t>(tensors.size());
  for (const auto& [name, t] : tensors) {
    w.put_string(name);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(t.shape().size()));
    for (auto dim : t.shape()) w.put<std::uint64_t>(dim);
    for (double x : t.values()) w.put<float>(static_cast<float>(x));
  }
  w.put<std::uint32_t>(crc_of(w.buffer().data(), w.buffer().size()));

  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write model file " + path.string());
    out.write(w.buffer().data(), static_cast<std::streamsize>(w.buffer().size()));
    if (!out) throw DataError("write failed: " + path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw DataError("cannot write model file " + path.string() + ": " + ec.message());
}

EmbeddingModel load_model(const std::filesystem::path& path) {
  Decoded d = decode(path);
  auto vocab = Vocabulary::from_entries(std::move(d.words), std::move(d.chars), d.min_count);
  EmbeddingModel model(d.kind, std::move(vocab), d.config);
  auto& tensors = model.params().tensors();
  if (tensors.size() != d.tensors.size())
    throw DataError(path.string() + ": tensor set does not match model kind");
  for (auto& [name, t] : tensors) {
    auto it = d.tensors.find(name);
    if (it == d.tensors.end()) throw DataError(path.string() + ": missing tensor " + name);
    std::vector<std::uint64_t> expect(t.shape().begin(), t.shape().end());
    if (it->second.shape != expect)
      throw DataError(path.string() + ": shape mismatch for tensor " + name);
    auto values = t.values();
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = it->second.values[i];
  }
  return model;
}

ModelInfo inspect_model(const std::filesystem::path& path) {
  Decoded d = decode(path);
  ModelInfo info;
  info.version = d.version;
  info.kind = d.kind;
  info.config = d.config;
  info.words = d.words.size();
  info.chars = d.chars.size();
  info.checksum = d.checksum;
  for (const auto& name : d.tensor_order) info.tensors.push_back({name, d.tensors[name].shape});
  return info;
}

std::string format_model_info(const ModelInfo& info) {
  std::ostringstream out;
  const auto& c = info.config;
  out << "version\t" << info.version << '\n'
      << "kind\t" << model_kind_name(info.kind) << '\n'
      << "d_wrd\t" << c.d_wrd << '\n'
      << "d_chr\t" << c.d_chr << '\n'
      << "window\t" << c.window << '\n'
      << "optimizer\t" << (c.optimizer == OptimizerKind::kAdam ? "adam" : "sgd") << '\n'
      << "lr_word\t" << c.lr_word << '\n'
      << "lr_char\t" << c.lr_char << '\n'
      << "adam_beta1\t" << c.adam_beta1 << '\n'
      << "adam_beta2\t" << c.adam_beta2 << '\n'
      << "adam_eps\t" << c.adam_eps << '\n'
      << "epochs\t" << c.epochs << '\n'
      << "seed\t" << c.seed << '\n'
      << "min_count\t" << c.min_count << '\n'
      << "grad_clip\t" << c.grad_clip << '\n'
      << "words\t" << info.words << '\n'
      << "chars\t" << info.chars << '\n';
  for (const auto& t : info.tensors) {
    out << "tensor\t" << t.name << '\t';
    for (std::size_t k = 0; k < t.shape.size(); ++k) out << (k ? "x" : "") << t.shape[k];
    out << '\n';
  }
  char crc[16];
  std::snprintf(crc, sizeof(crc), "%08x", info.checksum);
  out << "crc32\t" << crc << '\n';
  return out.str();
}

VocabPolicy parse_vocab_policy(std::string_view name) {
  if (name == "target-only") return VocabPolicy::kTargetOnly;
  if (name == "union") return VocabPolicy::kUnion;
  throw ConfigError("unknown vocab policy '" + std::string(name) + "' (target-only|union)");
}

WarmStartResult warm_start(const TransferPlan& plan) {
  return warm_start(load_model(plan.source), plan);
}

WarmStartResult warm_start(const EmbeddingModel& source, const TransferPlan& plan) {
  if (plan.expected_kind && *plan.expected_kind != source.kind())
    throw ConfigError("source model is " + std::string(model_kind_name(source.kind())) +
                      ", requested " + std::string(model_kind_name(*plan.expected_kind)));
  if (plan.target.empty()) throw DataError("target corpus is empty");

  const auto& cfg = source.config();
  Vocabulary target = Vocabulary::build(plan.target, cfg.min_count);
  if (plan.vocab_policy == VocabPolicy::kUnion) {
    std::map<std::string, std::uint64_t> words, chars;
    for (const Vocabulary* v : {&source.vocab(), static_cast<const Vocabulary*>(&target)}) {
      for (const auto& e : v->words()) words[e.term] += e.count;
      for (const auto& e : v->chars()) chars[e.term] += e.count;
    }
    std::vector<VocabEntry> w, c;
    for (auto& [term, count] : words) w.push_back({term, count});
    for (auto& [term, count] : chars) c.push_back({term, count});
    target = Vocabulary::from_entries(std::move(w), std::move(c), cfg.min_count);
  }

  WarmStartResult result{EmbeddingModel(source.kind(), std::move(target), cfg), {}, 0, 0};
  EmbeddingModel& model = result.model;
  auto& dst = model.params();
  const auto& src = source.params();
  for (auto& [name, tensor] : dst.tensors()) {
    if (name == "word") {
      copy_rows(src.get(name), source.vocab(), tensor, model.vocab(), false, result.copied_words);
    } else if (name == "char") {
      copy_rows(src.get(name), source.vocab(), tensor, model.vocab(), true, result.copied_chars);
    } else if (name == "word_nodes" || name == "char_nodes") {
      continue;  // tied to the Huffman tree of the source corpus
    } else if (src.contains(name) && src.get(name).shape() == tensor.shape()) {
      auto from = src.get(name).values();
      std::copy(from.begin(), from.end(), tensor.values().begin());
    }
  }
  model.reset_optimizer();
  if (plan.retrain_epochs > 0) result.log = model.train(plan.target, plan.retrain_epochs);
  return result;
}

}  // namespace reliefir
