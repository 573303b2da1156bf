#pragma once

#include <string>
#include <vector>

#include "typenet/dataset.hpp"
#include "typenet/embed.hpp"
#include "typenet/extract.hpp"
#include "typenet/vectorize.hpp"

namespace typenet::pipeline {

struct BuildConfig {
  int variant_id = 1;
  double split_ratio = 0.8;
  uint64_t seed = 1;
  size_t vocab_cap = 1000;
  bool auto_dim = false;  // recompute the embedding dimension by 4th root
  int fixed_dim = 14;
  embed::EmbeddingConfig embedding;

  uint64_t hash() const;
};

struct BuildArtifacts {
  dataset::SplitDataset split;
  embed::EmbeddingModel comment_embeddings;
  embed::EmbeddingModel identifier_embeddings;
  vectorize::TypeVocabulary vocab;
  std::vector<vectorize::Matrix> train_tensors;
  std::vector<uint32_t> train_labels;
  std::vector<vectorize::Matrix> test_tensors;
  std::vector<uint32_t> test_labels;
  int embedding_dim = 14;
};

// select -> datapoints -> split -> embeddings (train side) -> type
// vocabulary (train side) -> tensors for both sides
BuildArtifacts build_from_functions(const std::vector<extract::RawFunction>& fns,
                                    const BuildConfig& config, const nlp::Lexicon& lex);

// Writes datapoints.jsonl, split.train/split.test manifests, vocabulary,
// embeddings, tensor + label files and run_meta.json under `dir`.
void save_artifacts(const std::string& dir, const BuildArtifacts& artifacts,
                    const BuildConfig& config, const nlp::Lexicon& lex);

}  // namespace typenet::pipeline
