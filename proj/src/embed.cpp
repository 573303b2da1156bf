#include "typenet/embed.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "typenet/common.hpp"

namespace typenet::embed {

int embedding_dim(uint64_t unique_word_count) {
  double root = std::pow(static_cast<double>(unique_word_count), 0.25);
  int dim = static_cast<int>(std::lround(root));
  return std::max(dim, 1);
}

EmbeddingModel::EmbeddingModel(int dim, std::vector<std::string> words, std::vector<float> vectors)
    : dim_(dim), words_(std::move(words)), vectors_(std::move(vectors)) {
  if (vectors_.size() != words_.size() * static_cast<size_t>(dim_))
    throw DataError("embedding table size mismatch");
  for (size_t i = 0; i < words_.size(); ++i) index_.emplace(words_[i], i);
}

std::vector<float> EmbeddingModel::lookup(const std::string& word) const {
  std::vector<float> out(dim_, 0.0f);
  lookup_into(word, out.data());
  return out;
}

bool EmbeddingModel::lookup_into(const std::string& word, float* out) const {
  auto it = index_.find(word);
  if (it == index_.end()) {
    std::fill(out, out + dim_, 0.0f);
    return false;
  }
  const float* row = vectors_.data() + it->second * dim_;
  std::copy(row, row + dim_, out);
  return true;
}

double EmbeddingModel::cosine(const std::string& a, const std::string& b) const {
  std::vector<float> va = lookup(a), vb = lookup(b);
  double dot = 0, na = 0, nb = 0;
  for (int i = 0; i < dim_; ++i) {
    dot += va[i] * vb[i];
    na += va[i] * va[i];
    nb += vb[i] * vb[i];
  }
  if (na == 0 || nb == 0) return 0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

void EmbeddingModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write embeddings: " + path);
  out << words_.size() << ' ' << dim_ << '\n';
  out.precision(8);
  for (size_t i = 0; i < words_.size(); ++i) {
    out << words_[i];
    for (int d = 0; d < dim_; ++d) out << ' ' << vectors_[i * dim_ + d];
    out << '\n';
  }
}

EmbeddingModel EmbeddingModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open embeddings: " + path);
  size_t count;
  int dim;
  if (!(in >> count >> dim)) throw DataError("bad embeddings header: " + path);
  std::vector<std::string> words;
  std::vector<float> vectors;
  words.reserve(count);
  vectors.reserve(count * dim);
  for (size_t i = 0; i < count; ++i) {
    std::string word;
    if (!(in >> word)) throw DataError("embeddings truncated (header says " + std::to_string(count) + " words): " + path);
    words.push_back(word);
    for (int d = 0; d < dim; ++d) {
      float v;
      if (!(in >> v)) throw DataError("embeddings truncated: " + path);
      vectors.push_back(v);
    }
  }
  return EmbeddingModel(dim, std::move(words), std::move(vectors));
}

SentenceCorpora build_sentences(const std::vector<dataset::Datapoint>& points) {
  SentenceCorpora corpora;
  auto add = [](Corpus& c, const std::vector<std::string>& tokens) {
    if (!tokens.empty()) c.push_back(tokens);
  };
  for (const auto& dp : points) {
    if (dp.kind == dataset::Kind::Parameter) {
      add(corpora.identifiers, dp.name_tokens);
      add(corpora.comments, dp.comment_tokens);
    } else {
      add(corpora.identifiers, dp.fname_tokens);
      add(corpora.comments, dp.fcomment_tokens);
      add(corpora.comments, dp.rcomment_tokens);
      add(corpora.identifiers, dp.retexpr_tokens);
      add(corpora.identifiers, dp.paramname_tokens);
    }
  }
  return corpora;
}

namespace {

constexpr int kUnigramTableSize = 1 << 20;
constexpr double kUnigramPower = 0.75;

struct Vocab {
  std::vector<std::string> words;
  std::vector<uint64_t> counts;
  std::unordered_map<std::string, int> index;
};

Vocab build_vocab(const Corpus& corpus, int min_count_exclusive) {
  std::map<std::string, uint64_t> freq;  // ordered map for determinism
  for (const auto& sentence : corpus)
    for (const auto& word : sentence) ++freq[word];
  std::vector<std::pair<std::string, uint64_t>> kept;
  for (const auto& [word, count] : freq)
    if (count > static_cast<uint64_t>(min_count_exclusive)) kept.emplace_back(word, count);
  // descending count, ties lexicographic
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocab vocab;
  for (auto& [word, count] : kept) {
    vocab.index.emplace(word, static_cast<int>(vocab.words.size()));
    vocab.words.push_back(word);
    vocab.counts.push_back(count);
  }
  return vocab;
}

std::vector<int> build_unigram_table(const Vocab& vocab) {
  std::vector<int> table(kUnigramTableSize);
  double total = 0;
  for (uint64_t c : vocab.counts) total += std::pow(static_cast<double>(c), kUnigramPower);
  size_t i = 0;
  double cumulative = std::pow(static_cast<double>(vocab.counts[0]), kUnigramPower) / total;
  for (int a = 0; a < kUnigramTableSize; ++a) {
    table[a] = static_cast<int>(i);
    if (static_cast<double>(a) / kUnigramTableSize > cumulative && i + 1 < vocab.words.size()) {
      ++i;
      cumulative += std::pow(static_cast<double>(vocab.counts[i]), kUnigramPower) / total;
    }
  }
  return table;
}

inline float sigmoid(float x) {
  if (x > 6.0f) return 1.0f;
  if (x < -6.0f) return 0.0f;
  return 1.0f / (1.0f + std::exp(-x));
}

}  // namespace

EmbeddingModel train_embeddings(const Corpus& corpus, int dim, const EmbeddingConfig& config) {
  Vocab vocab = build_vocab(corpus, config.min_count_exclusive);
  if (vocab.words.empty()) throw DataError("empty vocabulary after min-count pruning");

  // sentences as index sequences, OOV dropped
  std::vector<std::vector<int>> data;
  uint64_t total_tokens = 0;
  for (const auto& sentence : corpus) {
    std::vector<int> ids;
    for (const auto& word : sentence) {
      auto it = vocab.index.find(word);
      if (it != vocab.index.end()) ids.push_back(it->second);
    }
    if (ids.size() >= 2) {
      total_tokens += ids.size();
      data.push_back(std::move(ids));
    }
  }

  std::vector<int> unigram = build_unigram_table(vocab);
  const size_t vocab_size = vocab.words.size();
  std::vector<float> syn0(vocab_size * dim);
  std::vector<float> syn1(vocab_size * dim, 0.0f);
  Rng rng(config.seed);
  for (auto& v : syn0) v = (rng.uniform_f() - 0.5f) / static_cast<float>(dim);

  std::vector<float> grad_center(dim);
  const uint64_t total_steps = std::max<uint64_t>(1, total_tokens * config.epochs);
  uint64_t processed = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (const auto& sentence : data) {
      for (size_t pos = 0; pos < sentence.size(); ++pos, ++processed) {
        float lr = config.initial_lr *
                   (1.0f - static_cast<float>(processed) / static_cast<float>(total_steps));
        if (lr < config.initial_lr * 1e-4f) lr = config.initial_lr * 1e-4f;
        int center = sentence[pos];
        int reduced = static_cast<int>(rng.below(config.window)) + 1;  // dynamic window
        for (int offset = -reduced; offset <= reduced; ++offset) {
          if (offset == 0) continue;
          long ctx_pos = static_cast<long>(pos) + offset;
          if (ctx_pos < 0 || ctx_pos >= static_cast<long>(sentence.size())) continue;
          int context = sentence[ctx_pos];
          float* v_center = syn0.data() + static_cast<size_t>(center) * dim;
          std::fill(grad_center.begin(), grad_center.end(), 0.0f);
          for (int k = 0; k <= config.negatives; ++k) {
            int target;
            float label;
            if (k == 0) {
              target = context;
              label = 1.0f;
            } else {
              target = unigram[rng.below(kUnigramTableSize)];
              if (target == context) continue;
              label = 0.0f;
            }
            float* v_target = syn1.data() + static_cast<size_t>(target) * dim;
            float dot = 0;
            for (int d = 0; d < dim; ++d) dot += v_center[d] * v_target[d];
            float g = (label - sigmoid(dot)) * lr;
            for (int d = 0; d < dim; ++d) grad_center[d] += g * v_target[d];
            for (int d = 0; d < dim; ++d) v_target[d] += g * v_center[d];
          }
          for (int d = 0; d < dim; ++d) v_center[d] += grad_center[d];
        }
      }
    }
  }

  return EmbeddingModel(dim, std::move(vocab.words), std::move(syn0));
}

}  // namespace typenet::embed
