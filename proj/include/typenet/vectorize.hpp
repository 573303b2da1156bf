#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "typenet/dataset.hpp"
#include "typenet/embed.hpp"

namespace typenet::vectorize {

using Matrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Most frequent type strings (descending frequency, ties lexicographic)
// plus a trailing "other" slot.
class TypeVocabulary {
 public:
  TypeVocabulary() = default;
  explicit TypeVocabulary(std::vector<std::string> types);

  size_t size() const { return types_.size() + 1; }  // including "other"
  size_t other_index() const { return types_.size(); }
  const std::vector<std::string>& types() const { return types_; }

  // index of the label, or other_index() when unknown
  size_t index_of(const std::string& label) const;
  // type string for an index; "other" for the final slot
  const std::string& type_at(size_t index) const;

  uint64_t hash() const;

  void save(const std::string& path) const;  // one type per line
  static TypeVocabulary load(const std::string& path);

 private:
  std::vector<std::string> types_;
  std::unordered_map<std::string, size_t> index_;
};

// built from the training split only
TypeVocabulary build_type_vocabulary(const std::vector<dataset::Datapoint>& train_points,
                                     size_t cap = 1000);

std::vector<float> encode_type(const TypeVocabulary& vocab, const std::string& label);

// Token budgets from the feature-length analysis.
struct FeatureBudget {
  int name = 6;
  int comment = 15;
  int return_comment = 6;
  int return_exprs = 12;
  int param_names = 10;
  int param_name = 6;
  int param_comment = 15;
};

constexpr int kSeqLen = 55;
constexpr int kSeqLenNoReturnExprs = 42;
constexpr int kEmbeddingDim = 14;

struct EmbeddingPair {
  const embed::EmbeddingModel* comments;
  const embed::EmbeddingModel* identifiers;
};

// First `budget` tokens embedded row-wise; short sequences zero-padded,
// long ones truncated.
Matrix embed_feature(const std::vector<std::string>& tokens, int budget,
                     const embed::EmbeddingModel& model);

Matrix vectorize_parameter(const dataset::Datapoint& dp, const EmbeddingPair& models);
Matrix vectorize_return(const dataset::Datapoint& dp, const EmbeddingPair& models);
Matrix vectorize(const dataset::Datapoint& dp, const EmbeddingPair& models);

// variants 1-3: identity; 4: return-expression rows zeroed; 5: separator +
// return-expression rows removed (55 -> 42 rows)
Matrix apply_variant(const Matrix& m, const dataset::DatasetVariant& v);

// Binary tensor file: magic "DLTV", u32 count/rows/cols, f32 row-major.
void save_tensors(const std::string& path, const std::vector<Matrix>& tensors);
std::vector<Matrix> load_tensors(const std::string& path);

void save_labels(const std::string& path, const std::vector<uint32_t>& labels);
std::vector<uint32_t> load_labels(const std::string& path);

}  // namespace typenet::vectorize
