#include "typenet/pipeline.hpp"

#include <filesystem>
#include <set>
#include <sstream>

#include "json.hpp"
#include "typenet/common.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace typenet::pipeline {

uint64_t BuildConfig::hash() const {
  std::ostringstream ss;
  ss << "variant=" << variant_id << ";ratio=" << split_ratio << ";seed=" << seed
     << ";cap=" << vocab_cap << ";auto_dim=" << auto_dim << ";dim=" << fixed_dim
     << ";window=" << embedding.window << ";min_count=" << embedding.min_count_exclusive
     << ";epochs=" << embedding.epochs << ";neg=" << embedding.negatives
     << ";lr=" << embedding.initial_lr << ";eseed=" << embedding.seed;
  return fnv1a64(ss.str());
}

BuildArtifacts build_from_functions(const std::vector<extract::RawFunction>& fns,
                                    const BuildConfig& config, const nlp::Lexicon& lex) {
  dataset::DatasetVariant v = dataset::variant(config.variant_id);
  auto selected = dataset::select_functions(fns);
  auto points = dataset::build_datapoints(selected, v, lex);
  if (points.empty()) throw DataError("no datapoints after selection and variant filtering");

  BuildArtifacts artifacts;
  artifacts.split = dataset::split_train_test(std::move(points), config.split_ratio, config.seed);

  embed::SentenceCorpora corpora = embed::build_sentences(artifacts.split.train);
  int dim = config.fixed_dim;
  if (config.auto_dim) {
    std::set<std::string> unique;
    for (const auto& s : corpora.comments) unique.insert(s.begin(), s.end());
    for (const auto& s : corpora.identifiers) unique.insert(s.begin(), s.end());
    dim = embed::embedding_dim(unique.size());
  }
  artifacts.embedding_dim = dim;

  embed::EmbeddingConfig ec = config.embedding;
  artifacts.comment_embeddings = embed::train_embeddings(corpora.comments, dim, ec);
  ec.seed = config.embedding.seed + 1;
  artifacts.identifier_embeddings = embed::train_embeddings(corpora.identifiers, dim, ec);

  artifacts.vocab = vectorize::build_type_vocabulary(artifacts.split.train, config.vocab_cap);

  vectorize::EmbeddingPair models{&artifacts.comment_embeddings, &artifacts.identifier_embeddings};
  auto vectorize_side = [&](const std::vector<dataset::Datapoint>& side,
                            std::vector<vectorize::Matrix>& tensors,
                            std::vector<uint32_t>& labels) {
    tensors.reserve(side.size());
    labels.reserve(side.size());
    for (const auto& dp : side) {
      tensors.push_back(vectorize::apply_variant(vectorize::vectorize(dp, models), v));
      labels.push_back(static_cast<uint32_t>(artifacts.vocab.index_of(dp.label)));
    }
  };
  vectorize_side(artifacts.split.train, artifacts.train_tensors, artifacts.train_labels);
  vectorize_side(artifacts.split.test, artifacts.test_tensors, artifacts.test_labels);
  return artifacts;
}

void save_artifacts(const std::string& dir, const BuildArtifacts& artifacts,
                    const BuildConfig& config, const nlp::Lexicon& lex) {
  fs::create_directories(dir);
  auto path = [&](const char* name) { return (fs::path(dir) / name).string(); };

  std::vector<dataset::Datapoint> all = artifacts.split.train;
  all.insert(all.end(), artifacts.split.test.begin(), artifacts.split.test.end());
  write_text_file(path("datapoints.jsonl"), dataset::to_jsonl(all));

  auto side_manifest = [](const std::vector<dataset::Datapoint>& side) {
    std::string out;
    for (const auto& dp : side) {
      out += dp.provenance;
      out += '\n';
    }
    return out;
  };
  write_text_file(path("split.train"), side_manifest(artifacts.split.train));
  write_text_file(path("split.test"), side_manifest(artifacts.split.test));

  artifacts.vocab.save(path("type_vocabulary.txt"));
  artifacts.comment_embeddings.save(path("embeddings.comments.txt"));
  artifacts.identifier_embeddings.save(path("embeddings.identifiers.txt"));
  vectorize::save_tensors(path("train.tensors"), artifacts.train_tensors);
  vectorize::save_labels(path("train.labels"), artifacts.train_labels);
  vectorize::save_tensors(path("test.tensors"), artifacts.test_tensors);
  vectorize::save_labels(path("test.labels"), artifacts.test_labels);

  json meta;
  meta["config_hash"] = to_hex(config.hash());
  meta["variant"] = config.variant_id;
  meta["seed"] = config.seed;
  meta["split_ratio"] = config.split_ratio;
  meta["embedding_dim"] = artifacts.embedding_dim;
  meta["vocab_hash"] = to_hex(artifacts.vocab.hash());
  meta["stopword_hash"] = to_hex(lex.stopword_hash());
  meta["lemma_hash"] = to_hex(lex.lemma_hash());
  meta["train_size"] = artifacts.split.train.size();
  meta["test_size"] = artifacts.split.test.size();
  meta["embedding"] = {{"window", config.embedding.window},
                       {"min_count_exclusive", config.embedding.min_count_exclusive},
                       {"epochs", config.embedding.epochs},
                       {"negatives", config.embedding.negatives},
                       {"initial_lr", config.embedding.initial_lr},
                       {"seed", config.embedding.seed},
                       {"objective", "skip-gram with negative sampling"}};
  write_text_file(path("run_meta.json"), meta.dump(2) + "\n");
}

}  // namespace typenet::pipeline
