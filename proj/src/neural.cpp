#include "typenet/neural.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

namespace typenet::neural {

int64_t gate_param_count(const std::string& kind, int input, int hidden) {
  int64_t gates;
  if (kind == "lstm")
    gates = 4;
  else if (kind == "gru")
    gates = 3;
  else
    throw UsageError("unknown cell kind: " + kind);
  return gates * (static_cast<int64_t>(input + hidden) * hidden + 2 * hidden);
}

int64_t param_count(const ModelConfig& c) {
  int64_t fc_in;
  int64_t recurrent = 0;
  switch (c.arch) {
    case Arch::A:
      recurrent = 2 * gate_param_count("lstm", c.input_dim, c.hidden_a) +
                  2 * gate_param_count("lstm", 2 * c.hidden_a, c.hidden_a);
      fc_in = 2 * c.hidden_a;
      break;
    case Arch::B:
      recurrent = gate_param_count("gru", c.input_dim, c.hidden_b);
      fc_in = c.hidden_b;
      break;
    case Arch::C:
      recurrent = 2 * gate_param_count("lstm", c.input_dim, c.hidden_c);
      fc_in = 2 * c.hidden_c;
      break;
    default:
      throw UsageError("unknown arch");
  }
  return recurrent + fc_in * c.output_dim + c.output_dim;
}

int default_epochs(Arch arch) { return arch == Arch::C ? 25 : 100; }

Arch arch_from_string(const std::string& name) {
  if (name == "A" || name == "a") return Arch::A;
  if (name == "B" || name == "b") return Arch::B;
  if (name == "C" || name == "c") return Arch::C;
  throw UsageError("unknown architecture: " + name + " (expected A, B or C)");
}

std::string arch_to_string(Arch arch) {
  switch (arch) {
    case Arch::A: return "a";
    case Arch::B: return "b";
    default: return "c";
  }
}

SeqBatch<float> pack_batch(const std::vector<vectorize::Matrix>& tensors,
                           const std::vector<size_t>& indices) {
  const int steps = static_cast<int>(tensors[indices[0]].rows());
  const int dim = static_cast<int>(tensors[indices[0]].cols());
  SeqBatch<float> xs(steps);
  for (int t = 0; t < steps; ++t) {
    xs[t].resize(static_cast<Eigen::Index>(indices.size()), dim);
    for (size_t b = 0; b < indices.size(); ++b) xs[t].row(b) = tensors[indices[b]].row(t);
  }
  return xs;
}

TrainedModel train(const ModelConfig& model_config, const TrainConfig& train_config,
                   const std::vector<vectorize::Matrix>& tensors,
                   const std::vector<uint32_t>& labels, uint64_t vocab_hash) {
  if (tensors.empty()) throw DataError("empty training set");
  if (tensors.size() != labels.size()) throw DataError("tensor/label count mismatch");

  TrainedModel model;
  model.classifier = SequenceClassifier<float>(model_config, train_config.seed);
  model.vocab_hash = vocab_hash;
  model.seed = train_config.seed;

  Adam<float> opt;
  opt.lr = train_config.learning_rate;
  Rng rng(train_config.seed ^ 0x5eedba5edull);

  std::vector<size_t> order(tensors.size());
  std::iota(order.begin(), order.end(), size_t{0});

  for (int epoch = 0; epoch < train_config.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0;
    size_t batches = 0;
    for (size_t start = 0; start < order.size(); start += train_config.batch_size) {
      size_t end = std::min(order.size(), start + train_config.batch_size);
      std::vector<size_t> idx(order.begin() + start, order.begin() + end);
      std::vector<uint32_t> batch_labels(idx.size());
      for (size_t b = 0; b < idx.size(); ++b) batch_labels[b] = labels[idx[b]];

      SeqBatch<float> xs = pack_batch(tensors, idx);
      Mat<float> probs = model.classifier.forward(xs);
      float loss = cross_entropy<float>(probs, batch_labels);
      if (!std::isfinite(loss))
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch + 1));
      model.classifier.zero_grads();
      model.classifier.backward(probs, batch_labels);
      auto params = model.classifier.params();
      opt.step(params);
      epoch_loss += loss;
      ++batches;
    }
    model.epoch_losses.push_back(epoch_loss / static_cast<double>(batches));
  }
  return model;
}

Mat<float> predict_probs(SequenceClassifier<float>& model,
                         const std::vector<vectorize::Matrix>& tensors, int batch_size) {
  Mat<float> all(static_cast<Eigen::Index>(tensors.size()), model.config().output_dim);
  for (size_t start = 0; start < tensors.size(); start += batch_size) {
    size_t end = std::min(tensors.size(), start + batch_size);
    std::vector<size_t> idx(end - start);
    std::iota(idx.begin(), idx.end(), start);
    Mat<float> probs = model.forward(pack_batch(tensors, idx));
    all.middleRows(static_cast<Eigen::Index>(start), probs.rows()) = probs;
  }
  return all;
}

std::vector<Prediction> predict_top_k(const Mat<float>& probs, Eigen::Index row, int k,
                                      const vectorize::TypeVocabulary& vocab) {
  const int n = static_cast<int>(probs.cols());
  if (k < 1 || k > n) throw UsageError("k out of range");
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&](int a, int b) {
    float pa = probs(row, a), pb = probs(row, b);
    if (pa != pb) return pa > pb;
    return a < b;
  });
  std::vector<Prediction> out;
  out.reserve(k);
  for (int i = 0; i < k; ++i)
    out.push_back({vocab.type_at(static_cast<size_t>(idx[i])), probs(row, idx[i])});
  return out;
}

namespace {

constexpr char kMagic[4] = {'T', 'N', 'C', 'P'};

template <typename T>
void write_pod(std::ofstream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw DataError("checkpoint truncated");
  return value;
}

void write_string(std::ofstream& out, const std::string& s) {
  write_pod<uint32_t>(out, static_cast<uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::ifstream& in) {
  uint32_t len = read_pod<uint32_t>(in);
  std::string s(len, '\0');
  in.read(s.data(), len);
  if (!in) throw DataError("checkpoint truncated");
  return s;
}

}  // namespace

void save_checkpoint(const std::string& path, TrainedModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  const ModelConfig& c = model.classifier.config();
  out.write(kMagic, 4);
  write_pod<uint8_t>(out, static_cast<uint8_t>(c.arch));
  write_pod<uint32_t>(out, static_cast<uint32_t>(c.input_dim));
  write_pod<uint32_t>(out, static_cast<uint32_t>(c.seq_len));
  write_pod<uint32_t>(out, static_cast<uint32_t>(c.output_dim));
  write_pod<uint32_t>(out, static_cast<uint32_t>(c.hidden_a));
  write_pod<uint32_t>(out, static_cast<uint32_t>(c.hidden_b));
  write_pod<uint32_t>(out, static_cast<uint32_t>(c.hidden_c));
  write_pod<uint64_t>(out, model.vocab_hash);
  write_pod<uint64_t>(out, model.seed);
  auto params = model.classifier.params();
  write_pod<uint32_t>(out, static_cast<uint32_t>(params.size()));
  for (const auto& p : params) {
    write_string(out, p.name);
    write_pod<uint32_t>(out, 2);  // rank
    write_pod<uint32_t>(out, static_cast<uint32_t>(p.value->rows()));
    write_pod<uint32_t>(out, static_cast<uint32_t>(p.value->cols()));
    out.write(reinterpret_cast<const char*>(p.value->data()),
              static_cast<std::streamsize>(sizeof(float) * p.value->size()));
  }
  write_pod<uint32_t>(out, static_cast<uint32_t>(model.epoch_losses.size()));
  for (double l : model.epoch_losses) write_pod<double>(out, l);
}

TrainedModel load_checkpoint(const std::string& path, uint64_t expected_vocab_hash) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw DataError("bad checkpoint magic: " + path);
  ModelConfig c;
  c.arch = static_cast<Arch>(read_pod<uint8_t>(in));
  c.input_dim = static_cast<int>(read_pod<uint32_t>(in));
  c.seq_len = static_cast<int>(read_pod<uint32_t>(in));
  c.output_dim = static_cast<int>(read_pod<uint32_t>(in));
  c.hidden_a = static_cast<int>(read_pod<uint32_t>(in));
  c.hidden_b = static_cast<int>(read_pod<uint32_t>(in));
  c.hidden_c = static_cast<int>(read_pod<uint32_t>(in));
  TrainedModel model;
  model.vocab_hash = read_pod<uint64_t>(in);
  model.seed = read_pod<uint64_t>(in);
  if (expected_vocab_hash != 0 && expected_vocab_hash != model.vocab_hash)
    throw DataError("vocabulary hash mismatch: checkpoint was trained against a different vocabulary");
  model.classifier = SequenceClassifier<float>(c, /*init_seed=*/model.seed);
  auto params = model.classifier.params();
  uint32_t n_tensors = read_pod<uint32_t>(in);
  if (n_tensors != params.size()) throw DataError("checkpoint tensor count mismatch");
  for (auto& p : params) {
    std::string name = read_string(in);
    if (name != p.name) throw DataError("checkpoint tensor order mismatch: " + name);
    uint32_t rank = read_pod<uint32_t>(in);
    if (rank != 2) throw DataError("unexpected tensor rank");
    uint32_t rows = read_pod<uint32_t>(in);
    uint32_t cols = read_pod<uint32_t>(in);
    if (rows != p.value->rows() || cols != p.value->cols())
      throw DataError("checkpoint tensor shape mismatch: " + name);
    in.read(reinterpret_cast<char*>(p.value->data()),
            static_cast<std::streamsize>(sizeof(float) * p.value->size()));
    if (!in) throw DataError("checkpoint truncated");
    if (!p.value->allFinite()) throw DataError("checkpoint tensor not finite: " + name);
  }
  uint32_t n_losses = read_pod<uint32_t>(in);
  for (uint32_t i = 0; i < n_losses; ++i) model.epoch_losses.push_back(read_pod<double>(in));
  return model;
}

}  // namespace typenet::neural
