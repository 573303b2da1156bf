// Acceptance gate: every criterion prints exactly one PASS/FAIL line and the
// process exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "support/golden_nlp.hpp"
#include "support/synthetic.hpp"
#include "typenet/common.hpp"
#include "typenet/eval.hpp"
#include "typenet/extract.hpp"
#include "typenet/neural.hpp"
#include "typenet/nlp.hpp"
#include "typenet/pipeline.hpp"

using namespace typenet;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void criterion(const std::string& name, const std::function<bool(std::string&)>& body) {
  std::string detail;
  bool ok = false;
  auto start = Clock::now();
  try {
    ok = body(detail);
  } catch (const std::exception& err) {
    detail = std::string("exception: ") + err.what();
  }
  double seconds = std::chrono::duration<double>(Clock::now() - start).count();
  std::ostringstream line;
  line << (ok ? "PASS" : "FAIL") << ": " << name;
  if (!detail.empty()) line << " (" << detail << ")";
  line << " [" << std::fixed << std::setprecision(1) << seconds << "s]";
  std::cout << line.str() << std::endl;
  if (!ok) ++failures;
}

// ---------------------------------------------------------------------------

bool check_param_counts(std::string& detail) {
  neural::ModelConfig a, b, c;
  a.arch = neural::Arch::A;
  b.arch = neural::Arch::B;
  c.arch = neural::Arch::C;
  a.output_dim = b.output_dim = c.output_dim = 1000;
  std::ostringstream got;
  got << neural::param_count(a) << "/" << neural::param_count(b) << "/"
      << neural::param_count(c);
  detail = got.str();
  if (neural::param_count(a) != 37288 || neural::param_count(b) != 11780 ||
      neural::param_count(c) != 404456)
    return false;
  for (auto cfg : {a, b, c}) {
    cfg.seq_len = 3;
    neural::SequenceClassifier<float> model(cfg, 1);
    if (model.actual_param_count() != neural::param_count(cfg)) {
      detail += "; allocated tensors disagree";
      return false;
    }
  }
  return true;
}

bool check_shapes(std::string& detail) {
  std::vector<std::string> words = {"alpha", "beta"};
  std::vector<float> vecs(words.size() * vectorize::kEmbeddingDim, 0.5f);
  embed::EmbeddingModel model(vectorize::kEmbeddingDim, words, vecs);
  vectorize::EmbeddingPair pair{&model, &model};

  dataset::Datapoint param;
  param.kind = dataset::Kind::Parameter;
  param.name_tokens = {"alpha"};
  param.comment_tokens = {"beta"};
  dataset::Datapoint ret;
  ret.kind = dataset::Kind::Return;
  ret.fname_tokens = {"alpha"};
  ret.retexpr_tokens = {"beta"};

  auto pm = vectorize::vectorize(param, pair);
  auto rm = vectorize::vectorize(ret, pair);
  if (pm.rows() != 55 || pm.cols() != 14 || rm.rows() != 55 || rm.cols() != 14) {
    detail = "wrong base shape";
    return false;
  }
  if (pm(0, 0) != 1.0f || pm(0, 1) != 0.0f || rm(0, 0) != 0.0f || rm(0, 1) != 1.0f) {
    detail = "datapoint-type row wrong";
    return false;
  }
  for (int r : {1, 8, 24, 31, 44}) {
    for (const auto& m : {pm, rm}) {
      for (int col = 0; col < m.cols(); ++col) {
        if (m(r, col) != 1.0f) {
          detail = "separator row " + std::to_string(r) + " not all-ones";
          return false;
        }
      }
    }
  }
  auto v4 = vectorize::apply_variant(rm, dataset::variant(4));
  for (int r = 32; r < 44; ++r) {
    if (v4.row(r).cwiseAbs().sum() != 0.0f) {
      detail = "variant 4 block not zeroed";
      return false;
    }
  }
  auto v5 = vectorize::apply_variant(rm, dataset::variant(5));
  if (v5.rows() != 42 || v5.cols() != 14) {
    detail = "variant 5 shape wrong";
    return false;
  }
  detail = "55x14 and 42x14 with separators at 1/8/24/31/44";
  return true;
}

bool check_preprocessing(std::string& detail) {
  const auto& lex = nlp::Lexicon::default_instance();
  size_t checked = 0;
  if (nlp::normalize_text("object.property") != "object property") {
    detail = "normalize_text('object.property')";
    return false;
  }
  if (lex.lemmatize("removing") != "remove" || lex.lemmatize("removed") != "remove") {
    detail = "lemmatizer on removing/removed";
    return false;
  }
  if (nlp::normalize_text("Remove v2.0 items.") != "remove v items") {
    detail = "normalize_text('Remove v2.0 items.')";
    return false;
  }
  checked += 3;
  for (const auto& c : testsupport::golden_cases()) {
    auto out = c.identifier ? nlp::preprocess_identifier(c.input, lex).tokens
                            : nlp::preprocess_comment(c.input, lex).tokens;
    if (out != c.expected) {
      detail = "case '" + c.input + "'";
      return false;
    }
    ++checked;
  }
  detail = std::to_string(checked) + " golden cases";
  return checked >= 33;
}

eval::EvalCounts oracle_counts(const neural::Mat<float>& probs,
                               const std::vector<uint32_t>& labels, size_t other_index) {
  eval::EvalCounts counts;
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    counts.p += 1;
    std::vector<size_t> order(probs.cols());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t x, size_t y) { return probs(r, x) > probs(r, y); });
    if (order[0] == other_index) continue;
    counts.p_valid += 1;
    if (labels[r] == other_index) continue;
    for (int k = 1; k <= 3; ++k) {
      int depth = std::min<int>(k, static_cast<int>(order.size()));
      for (int i = 0; i < depth; ++i) {
        if (order[i] == labels[r]) {
          counts.p_valid_correct[k - 1] += 1;
          break;
        }
      }
    }
  }
  return counts;
}

bool check_metrics(std::string& detail) {
  // worked example: p=4, p_valid=3, correct@2=2 -> P=2/3, R=1/2, F1=4/7
  neural::Mat<float> probs = neural::Mat<float>::Zero(4, 4);
  auto set_row = [&](int r, std::vector<int> ranking) {
    float v = 0.9f;
    for (int cls : ranking) {
      probs(r, cls) = v;
      v *= 0.5f;
    }
  };
  set_row(0, {0, 1, 2, 3});
  set_row(1, {2, 1, 0, 3});
  set_row(2, {0, 1, 3, 2});
  set_row(3, {3, 0, 1, 2});
  auto report = eval::evaluate(probs, {0, 1, 2, 0}, 3);
  if (report.counts.p != 4 || report.counts.p_valid != 3 ||
      report.counts.p_valid_correct[1] != 2 ||
      std::abs(report.at_k[1].precision - 2.0 / 3.0) > 1e-12 ||
      std::abs(report.at_k[1].recall - 0.5) > 1e-12 ||
      std::abs(report.at_k[1].f1 - 4.0 / 7.0) > 1e-12) {
    detail = "worked example mismatch";
    return false;
  }

  Rng rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    int classes = 2 + static_cast<int>(rng.below(9));
    int rows = 1 + static_cast<int>(rng.below(10));
    size_t other_index = classes - 1;
    neural::Mat<float> p(rows, classes);
    std::vector<uint32_t> labels(rows);
    for (int r = 0; r < rows; ++r) {
      labels[r] = static_cast<uint32_t>(rng.below(classes));
      for (int col = 0; col < classes; ++col) p(r, col) = rng.uniform_f();
    }
    auto got = eval::evaluate(p, labels, other_index);
    auto want = oracle_counts(p, labels, other_index);
    if (got.counts.p != want.p || got.counts.p_valid != want.p_valid ||
        got.counts.p_valid_correct != want.p_valid_correct) {
      detail = "disagrees with brute-force oracle at trial " + std::to_string(trial);
      return false;
    }
    for (int k = 0; k < 3; ++k) {
      double precision = want.p_valid ? double(want.p_valid_correct[k]) / double(want.p_valid) : 0;
      double recall = double(want.p_valid_correct[k]) / double(want.p);
      if (std::abs(got.at_k[k].precision - precision) > 1e-12 ||
          std::abs(got.at_k[k].recall - recall) > 1e-12) {
        detail = "metric formula mismatch at trial " + std::to_string(trial);
        return false;
      }
    }
  }
  detail = "worked example + 500 randomized oracle comparisons";
  return true;
}

bool check_gradients(std::string& detail) {
  Rng rng(31337);
  double worst = 0;
  int instances = 0;
  const double eps = 1e-4;
  for (int round = 0; round < 3 && instances < 100; ++round) {
    for (auto arch : {neural::Arch::A, neural::Arch::B, neural::Arch::C}) {
      neural::ModelConfig cfg;
      cfg.arch = arch;
      cfg.input_dim = 4 + static_cast<int>(rng.below(3));
      cfg.seq_len = 4 + static_cast<int>(rng.below(4));
      cfg.output_dim = 3 + static_cast<int>(rng.below(4));
      cfg.hidden_a = 3;
      cfg.hidden_b = 4;
      cfg.hidden_c = 5;
      neural::SequenceClassifier<double> model(cfg, rng.next());
      int batch = 2 + static_cast<int>(rng.below(3));
      neural::SeqBatch<double> xs(cfg.seq_len);
      for (auto& x : xs) {
        x.resize(batch, cfg.input_dim);
        for (int r = 0; r < batch; ++r)
          for (int c = 0; c < cfg.input_dim; ++c) x(r, c) = rng.uniform() * 2 - 1;
      }
      std::vector<uint32_t> labels(batch);
      for (auto& l : labels) l = static_cast<uint32_t>(rng.below(cfg.output_dim));

      model.zero_grads();
      auto probs = model.forward(xs);
      model.backward(probs, labels);
      auto params = model.params();
      for (int s = 0; s < 12 && instances < 100; ++s, ++instances) {
        auto& p = params[rng.below(params.size())];
        Eigen::Index idx = static_cast<Eigen::Index>(rng.below(p.value->size()));
        double* coeff = p.value->data() + idx;
        double original = *coeff;
        *coeff = original + eps;
        double up = neural::cross_entropy<double>(model.forward(xs), labels);
        *coeff = original - eps;
        double down = neural::cross_entropy<double>(model.forward(xs), labels);
        *coeff = original;
        double numeric = (up - down) / (2 * eps);
        double analytic = *(p.grad->data() + idx);
        double denom = std::max({std::abs(numeric), std::abs(analytic), 1e-3});
        worst = std::max(worst, std::abs(numeric - analytic) / denom);
      }
    }
  }
  std::ostringstream s;
  s << instances << " finite-difference checks, worst relative error " << std::scientific
    << std::setprecision(2) << worst;
  detail = s.str();
  return instances >= 100 && worst < 1e-4;
}

bool check_softmax(std::string& detail) {
  Rng rng(55);
  double worst = 0;
  for (int trial = 0; trial < 50; ++trial) {
    int rows = 1 + static_cast<int>(rng.below(16));
    int cols = 2 + static_cast<int>(rng.below(40));
    neural::Mat<float> logits(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) logits(r, c) = rng.uniform_f() * 40 - 20;
    auto probs = neural::softmax<float>(logits);
    for (int r = 0; r < rows; ++r) {
      worst = std::max(worst, std::abs(double(probs.row(r).sum()) - 1.0));
      if (probs.row(r).minCoeff() < 0) {
        detail = "negative probability";
        return false;
      }
    }
  }
  std::ostringstream s;
  s << "worst row-sum deviation " << std::scientific << std::setprecision(2) << worst;
  detail = s.str();
  return worst < 1e-6;
}

bool check_embeddings(std::string& detail) {
  if (embed::embedding_dim(38416) != 14) {
    detail = "embedding_dim(38416) != 14";
    return false;
  }
  embed::Corpus boundary;
  for (int i = 0; i < 5; ++i) boundary.push_back({"rare", "filler"});
  for (int i = 0; i < 6; ++i) boundary.push_back({"kept", "filler"});
  embed::EmbeddingConfig cfg;
  cfg.epochs = 1;
  auto boundary_model = embed::train_embeddings(boundary, 4, cfg);
  if (boundary_model.contains("rare") || !boundary_model.contains("kept")) {
    detail = "min-count boundary (5 excluded, 6 kept) violated";
    return false;
  }

  embed::Corpus corpus;
  std::vector<std::string> fruit = {"apple", "banana", "cherry", "mango"};
  std::vector<std::string> metal = {"iron", "copper", "zinc", "nickel"};
  Rng rng(7);
  for (int i = 0; i < 400; ++i) {
    for (const auto& family : {fruit, metal}) {
      std::vector<std::string> sentence;
      for (int j = 0; j < 8; ++j) sentence.push_back(family[rng.below(family.size())]);
      corpus.push_back(sentence);
    }
  }
  embed::EmbeddingConfig cfg2;
  auto model = embed::train_embeddings(corpus, 8, cfg2);
  double same = model.cosine("apple", "banana");
  double cross = model.cosine("apple", "iron");
  std::ostringstream s;
  s << "in-family cosine " << std::fixed << std::setprecision(3) << same << " vs cross-family "
    << cross;
  detail = s.str();
  return same > cross + 0.2;
}

struct DeskData {
  pipeline::BuildArtifacts v1;
  pipeline::BuildArtifacts v3;
};

DeskData build_desk_data() {
  fs::path root = fs::temp_directory_path() / "typenet_acceptance_corpus";
  fs::remove_all(root);
  testsupport::CorpusOptions opts;
  opts.functions = 2000;
  auto manifest_path = testsupport::generate_corpus(root, opts);
  auto manifest = extract::load_manifest(manifest_path.string());
  extract::ExtractionStats stats;
  auto fns = extract::extract_corpus(manifest, stats);
  if (stats.parse_failed != 0) throw DataError("synthetic corpus failed to parse");

  const auto& lex = nlp::Lexicon::default_instance();
  DeskData data;
  pipeline::BuildConfig cfg;
  cfg.variant_id = 1;
  cfg.seed = 13;
  data.v1 = pipeline::build_from_functions(fns, cfg, lex);
  cfg.variant_id = 3;
  data.v3 = pipeline::build_from_functions(fns, cfg, lex);
  return data;
}

eval::EvalReport train_and_eval(const pipeline::BuildArtifacts& art, neural::Arch arch,
                                int epochs, uint64_t seed) {
  neural::ModelConfig cfg;
  cfg.arch = arch;
  cfg.seq_len = static_cast<int>(art.train_tensors.at(0).rows());
  cfg.input_dim = static_cast<int>(art.train_tensors.at(0).cols());
  cfg.output_dim = static_cast<int>(art.vocab.size());
  neural::TrainConfig tc;
  tc.epochs = epochs;
  tc.batch_size = 128;
  tc.learning_rate = 1e-3f;
  tc.seed = seed;
  auto model = neural::train(cfg, tc, art.train_tensors, art.train_labels, art.vocab.hash());
  auto probs = neural::predict_probs(model.classifier, art.test_tensors);
  return eval::evaluate(probs, art.test_labels, art.vocab.other_index());
}

bool check_end_to_end(DeskData& data, std::string& detail) {
  auto v1_report = train_and_eval(data.v1, neural::Arch::C, 5, 21);
  auto v3_report = train_and_eval(data.v3, neural::Arch::C, 5, 21);
  std::ostringstream s;
  s << "v1: " << data.v1.split.train.size() << "+" << data.v1.split.test.size()
    << " points, top-3 recall " << std::fixed << std::setprecision(3) << v1_report.at_k[2].recall
    << "; top-1 F1 v1 " << v1_report.at_k[0].f1 << " vs v3 " << v3_report.at_k[0].f1;
  detail = s.str();
  return v1_report.at_k[2].recall >= 0.80 && v1_report.at_k[0].f1 > v3_report.at_k[0].f1;
}

bool check_overfit(DeskData& data, std::string& detail) {
  const size_t n = 100;
  std::vector<vectorize::Matrix> tensors(data.v1.train_tensors.begin(),
                                         data.v1.train_tensors.begin() + n);
  std::vector<uint32_t> labels(data.v1.train_labels.begin(), data.v1.train_labels.begin() + n);
  neural::ModelConfig cfg;
  cfg.arch = neural::Arch::A;
  cfg.seq_len = static_cast<int>(tensors[0].rows());
  cfg.input_dim = static_cast<int>(tensors[0].cols());
  cfg.output_dim = static_cast<int>(data.v1.vocab.size());
  neural::TrainConfig tc;
  tc.epochs = 150;
  tc.batch_size = 25;
  tc.learning_rate = 5e-3f;
  tc.seed = 4;
  auto model = neural::train(cfg, tc, tensors, labels, 0);
  auto probs = neural::predict_probs(model.classifier, tensors);
  size_t correct = 0;
  for (size_t i = 0; i < n; ++i) {
    Eigen::Index arg;
    probs.row(static_cast<Eigen::Index>(i)).maxCoeff(&arg);
    if (static_cast<uint32_t>(arg) == labels[i]) ++correct;
  }
  std::ostringstream s;
  s << correct << "/" << n << " memorized";
  detail = s.str();
  return correct >= 95;
}

std::string file_bytes(const fs::path& path) { return read_text_file(path.string()); }

bool check_determinism(std::string& detail) {
  fs::path root = fs::temp_directory_path() / "typenet_acceptance_det";
  fs::remove_all(root);
  testsupport::CorpusOptions opts;
  opts.functions = 150;
  opts.projects = 2;
  opts.files_per_project = 3;
  auto manifest_path = testsupport::generate_corpus(root / "corpus", opts);
  auto manifest = extract::load_manifest(manifest_path.string());
  const auto& lex = nlp::Lexicon::default_instance();

  pipeline::BuildConfig cfg;
  cfg.variant_id = 3;
  cfg.seed = 99;
  std::vector<std::string> csvs;
  for (int run = 0; run < 2; ++run) {
    extract::ExtractionStats stats;
    auto fns = extract::extract_corpus(manifest, stats);
    auto art = pipeline::build_from_functions(fns, cfg, lex);
    fs::path dir = root / ("run" + std::to_string(run));
    pipeline::save_artifacts(dir.string(), art, cfg, lex);

    neural::ModelConfig mc;
    mc.arch = neural::Arch::B;
    mc.seq_len = static_cast<int>(art.train_tensors.at(0).rows());
    mc.input_dim = static_cast<int>(art.train_tensors.at(0).cols());
    mc.output_dim = static_cast<int>(art.vocab.size());
    neural::TrainConfig tc;
    tc.epochs = 5;
    tc.batch_size = 64;
    tc.seed = 17;
    auto model = neural::train(mc, tc, art.train_tensors, art.train_labels, art.vocab.hash());
    neural::save_checkpoint((dir / "model.ckpt").string(), model);

    auto probs = neural::predict_probs(model.classifier, art.test_tensors);
    auto report = eval::evaluate(probs, art.test_labels, art.vocab.other_index());
    report.arch = "b";
    report.variant = 3;
    report.seed = tc.seed;
    csvs.push_back(eval::report_csv({report}));
  }
  for (const char* name : {"train.tensors", "test.tensors", "train.labels", "test.labels",
                           "type_vocabulary.txt", "embeddings.comments.txt",
                           "embeddings.identifiers.txt", "datapoints.jsonl", "model.ckpt"}) {
    if (file_bytes(root / "run0" / name) != file_bytes(root / "run1" / name)) {
      detail = std::string(name) + " differs between identical runs";
      return false;
    }
  }
  if (csvs[0] != csvs[1]) {
    detail = "evaluation reports differ between identical runs";
    return false;
  }
  detail = "tensors, checkpoints and reports byte-identical across reruns";
  return true;
}

}  // namespace

int main() {
  extract::ensure_python_runtime();

  criterion("model parameter counts match the published totals", check_param_counts);
  criterion("sequence layout shapes and separator rows", check_shapes);
  criterion("preprocessing golden suite", check_preprocessing);
  criterion("evaluation metrics match a brute-force oracle", check_metrics);
  criterion("analytic gradients match finite differences", check_gradients);
  criterion("softmax rows are normalized within 1e-6", check_softmax);
  criterion("skip-gram embedding properties", check_embeddings);

  DeskData desk;
  bool desk_ready = false;
  criterion("synthetic corpus extracts and vectorizes", [&](std::string& detail) {
    desk = build_desk_data();
    desk_ready = desk.v1.train_tensors.size() > 1000 && desk.v3.train_tensors.size() > 2000;
    std::ostringstream s;
    s << "v1 train " << desk.v1.train_tensors.size() << ", v3 train "
      << desk.v3.train_tensors.size();
    detail = s.str();
    return desk_ready;
  });
  criterion("end-to-end: top-3 recall >= 0.80 and variant 1 beats variant 3",
            [&](std::string& detail) {
              if (!desk_ready) {
                detail = "skipped: corpus build failed";
                return false;
              }
              return check_end_to_end(desk, detail);
            });
  criterion("overfit sanity: 100 training points memorized to >= 95%",
            [&](std::string& detail) {
              if (!desk_ready) {
                detail = "skipped: corpus build failed";
                return false;
              }
              return check_overfit(desk, detail);
            });
  criterion("full pipeline is byte-deterministic", check_determinism);

  std::cout << (failures == 0 ? "ALL CRITERIA PASSED" : "FAILURES: " + std::to_string(failures))
            << std::endl;
  return failures == 0 ? 0 : 1;
}
