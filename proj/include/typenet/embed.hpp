#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "typenet/dataset.hpp"

namespace typenet::embed {

struct EmbeddingConfig {
  int window = 5;
  int min_count_exclusive = 5;  // words occurring <= this are dropped
  int epochs = 15;
  int negatives = 5;
  float initial_lr = 0.025f;
  uint64_t seed = 1;
};

// round(n^(1/4)), minimum 1
int embedding_dim(uint64_t unique_word_count);

class EmbeddingModel {
 public:
  EmbeddingModel() = default;
  EmbeddingModel(int dim, std::vector<std::string> words, std::vector<float> vectors);

  int dim() const { return dim_; }
  size_t vocab_size() const { return words_.size(); }
  bool contains(const std::string& word) const { return index_.count(word) > 0; }
  const std::vector<std::string>& words() const { return words_; }

  // the trained vector, or the zero vector for out-of-vocabulary words
  std::vector<float> lookup(const std::string& word) const;
  // writes `dim` floats to `out`; returns false (and zero-fills) when OOV
  bool lookup_into(const std::string& word, float* out) const;

  double cosine(const std::string& a, const std::string& b) const;

  // classic text format: `<vocab_size> <dim>` header, then one word per line
  void save(const std::string& path) const;
  static EmbeddingModel load(const std::string& path);

 private:
  int dim_ = 0;
  std::vector<std::string> words_;
  std::unordered_map<std::string, size_t> index_;
  std::vector<float> vectors_;  // vocab_size x dim, row major
};

using Corpus = std::vector<std::vector<std::string>>;

// Skip-gram with negative sampling; single-threaded and deterministic for a
// fixed seed.
EmbeddingModel train_embeddings(const Corpus& corpus, int dim, const EmbeddingConfig& config);

// Routes datapoint token fields into the two training corpora: comments vs
// identifiers (function names, parameter names, return-expression tokens).
struct SentenceCorpora {
  Corpus comments;
  Corpus identifiers;
};

SentenceCorpora build_sentences(const std::vector<dataset::Datapoint>& points);

}  // namespace typenet::embed
