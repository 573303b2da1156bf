#include "typenet/vectorize.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "typenet/common.hpp"

namespace typenet::vectorize {

TypeVocabulary::TypeVocabulary(std::vector<std::string> types) : types_(std::move(types)) {
  for (size_t i = 0; i < types_.size(); ++i) index_.emplace(types_[i], i);
}

size_t TypeVocabulary::index_of(const std::string& label) const {
  auto it = index_.find(label);
  return it == index_.end() ? other_index() : it->second;
}

const std::string& TypeVocabulary::type_at(size_t index) const {
  static const std::string kOther = "other";
  if (index >= types_.size()) return kOther;
  return types_[index];
}

uint64_t TypeVocabulary::hash() const {
  uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& t : types_) {
    h = fnv1a64(t, h);
    h = fnv1a64("\n", h);
  }
  return h;
}

void TypeVocabulary::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write vocabulary: " + path);
  for (const auto& t : types_) out << t << '\n';
}

TypeVocabulary TypeVocabulary::load(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::vector<std::string> types;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) types.push_back(line);
  }
  return TypeVocabulary(std::move(types));
}

TypeVocabulary build_type_vocabulary(const std::vector<dataset::Datapoint>& train_points,
                                     size_t cap) {
  if (train_points.empty()) throw DataError("empty dataset: cannot build type vocabulary");
  std::map<std::string, uint64_t> freq;
  for (const auto& dp : train_points) ++freq[dp.label];
  std::vector<std::pair<std::string, uint64_t>> sorted(freq.begin(), freq.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (sorted.size() > cap) sorted.resize(cap);
  std::vector<std::string> types;
  types.reserve(sorted.size());
  for (auto& [t, c] : sorted) types.push_back(t);
  return TypeVocabulary(std::move(types));
}

std::vector<float> encode_type(const TypeVocabulary& vocab, const std::string& label) {
  std::vector<float> onehot(vocab.size(), 0.0f);
  onehot[vocab.index_of(label)] = 1.0f;
  return onehot;
}

Matrix embed_feature(const std::vector<std::string>& tokens, int budget,
                     const embed::EmbeddingModel& model) {
  Matrix block = Matrix::Zero(budget, model.dim());
  int rows = std::min<int>(budget, static_cast<int>(tokens.size()));
  for (int r = 0; r < rows; ++r) model.lookup_into(tokens[r], block.row(r).data());
  return block;
}

namespace {

// Shared 55-row frame: datapoint-type row, then five feature blocks split
// by all-ones separator rows.
Matrix assemble(int type_slot, const std::vector<Matrix>& blocks) {
  Matrix m = Matrix::Zero(kSeqLen, kEmbeddingDim);
  m(0, type_slot) = 1.0f;
  int row = 1;
  for (const auto& block : blocks) {
    m.row(row).setOnes();
    ++row;
    m.block(row, 0, block.rows(), kEmbeddingDim) = block;
    row += static_cast<int>(block.rows());
  }
  return m;
}

}  // namespace

Matrix vectorize_parameter(const dataset::Datapoint& dp, const EmbeddingPair& models) {
  FeatureBudget budget;
  std::vector<Matrix> blocks;
  blocks.push_back(embed_feature(dp.name_tokens, budget.param_name, *models.identifiers));
  blocks.push_back(embed_feature(dp.comment_tokens, budget.param_comment, *models.comments));
  blocks.push_back(Matrix::Zero(budget.return_comment, kEmbeddingDim));
  blocks.push_back(Matrix::Zero(budget.return_exprs, kEmbeddingDim));
  blocks.push_back(Matrix::Zero(budget.param_names, kEmbeddingDim));
  return assemble(0, blocks);
}

Matrix vectorize_return(const dataset::Datapoint& dp, const EmbeddingPair& models) {
  FeatureBudget budget;
  std::vector<Matrix> blocks;
  blocks.push_back(embed_feature(dp.fname_tokens, budget.name, *models.identifiers));
  blocks.push_back(embed_feature(dp.fcomment_tokens, budget.comment, *models.comments));
  blocks.push_back(embed_feature(dp.rcomment_tokens, budget.return_comment, *models.comments));
  blocks.push_back(embed_feature(dp.retexpr_tokens, budget.return_exprs, *models.identifiers));
  blocks.push_back(embed_feature(dp.paramname_tokens, budget.param_names, *models.identifiers));
  return assemble(1, blocks);
}

Matrix vectorize(const dataset::Datapoint& dp, const EmbeddingPair& models) {
  return dp.kind == dataset::Kind::Parameter ? vectorize_parameter(dp, models)
                                             : vectorize_return(dp, models);
}

Matrix apply_variant(const Matrix& m, const dataset::DatasetVariant& v) {
  // return-expression block: separator at row 31, tokens at rows 32..43
  constexpr int kSepRow = 31;
  constexpr int kBlockStart = 32;
  constexpr int kBlockLen = 12;
  if (v.zero_return_exprs) {
    Matrix out = m;
    out.block(kBlockStart, 0, kBlockLen, m.cols()).setZero();
    return out;
  }
  if (v.drop_return_expr_rows) {
    Matrix out(kSeqLenNoReturnExprs, m.cols());
    out.topRows(kSepRow) = m.topRows(kSepRow);
    out.bottomRows(kSeqLen - kBlockStart - kBlockLen) =
        m.bottomRows(kSeqLen - kBlockStart - kBlockLen);
    return out;
  }
  return m;
}

namespace {

constexpr char kMagic[4] = {'D', 'L', 'T', 'V'};

template <typename T>
void write_pod(std::ofstream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw DataError("tensor file truncated");
  return value;
}

}  // namespace

void save_tensors(const std::string& path, const std::vector<Matrix>& tensors) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write tensor file: " + path);
  out.write(kMagic, 4);
  uint32_t count = static_cast<uint32_t>(tensors.size());
  uint32_t rows = tensors.empty() ? 0 : static_cast<uint32_t>(tensors[0].rows());
  uint32_t cols = tensors.empty() ? 0 : static_cast<uint32_t>(tensors[0].cols());
  write_pod(out, count);
  write_pod(out, rows);
  write_pod(out, cols);
  for (const auto& t : tensors) {
    if (static_cast<uint32_t>(t.rows()) != rows || static_cast<uint32_t>(t.cols()) != cols)
      throw DataError("tensor file requires uniform shapes");
    out.write(reinterpret_cast<const char*>(t.data()), sizeof(float) * rows * cols);
  }
}

std::vector<Matrix> load_tensors(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open tensor file: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw DataError("bad tensor file magic: " + path);
  uint32_t count = read_pod<uint32_t>(in);
  uint32_t rows = read_pod<uint32_t>(in);
  uint32_t cols = read_pod<uint32_t>(in);
  std::vector<Matrix> tensors;
  tensors.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    Matrix t(rows, cols);
    in.read(reinterpret_cast<char*>(t.data()), sizeof(float) * rows * cols);
    if (!in) throw DataError("tensor file truncated: " + path);
    tensors.push_back(std::move(t));
  }
  return tensors;
}

void save_labels(const std::string& path, const std::vector<uint32_t>& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write label file: " + path);
  uint32_t count = static_cast<uint32_t>(labels.size());
  write_pod(out, count);
  out.write(reinterpret_cast<const char*>(labels.data()), sizeof(uint32_t) * labels.size());
}

std::vector<uint32_t> load_labels(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open label file: " + path);
  uint32_t count = read_pod<uint32_t>(in);
  std::vector<uint32_t> labels(count);
  in.read(reinterpret_cast<char*>(labels.data()), sizeof(uint32_t) * count);
  if (!in) throw DataError("label file truncated: " + path);
  return labels;
}

}  // namespace typenet::vectorize
