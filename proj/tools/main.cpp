#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <nlohmann/json.hpp>

#include "typenet/common.hpp"
#include "typenet/eval.hpp"
#include "typenet/extract.hpp"
#include "typenet/neural.hpp"
#include "typenet/pipeline.hpp"

namespace fs = std::filesystem;
using namespace typenet;

namespace {

std::vector<uint64_t> parse_seeds(const std::string& csv) {
  std::vector<uint64_t> seeds;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) seeds.push_back(std::stoull(item));
  }
  if (seeds.empty()) throw UsageError("no seeds given");
  return seeds;
}

struct BuildDir {
  std::vector<vectorize::Matrix> train_tensors, test_tensors;
  std::vector<uint32_t> train_labels, test_labels;
  vectorize::TypeVocabulary vocab;
};

BuildDir load_build_dir(const std::string& dir) {
  BuildDir b;
  b.train_tensors = vectorize::load_tensors(dir + "/train.tensors");
  b.train_labels = vectorize::load_labels(dir + "/train.labels");
  b.test_tensors = vectorize::load_tensors(dir + "/test.tensors");
  b.test_labels = vectorize::load_labels(dir + "/test.labels");
  b.vocab = vectorize::TypeVocabulary::load(dir + "/type_vocabulary.txt");
  if (b.train_tensors.size() != b.train_labels.size() ||
      b.test_tensors.size() != b.test_labels.size())
    throw DataError("tensor/label count mismatch in " + dir);
  return b;
}

neural::ModelConfig model_config_for(neural::Arch arch, const BuildDir& b) {
  neural::ModelConfig cfg;
  cfg.arch = arch;
  cfg.seq_len = static_cast<int>(b.train_tensors.at(0).rows());
  cfg.input_dim = static_cast<int>(b.train_tensors.at(0).cols());
  cfg.output_dim = static_cast<int>(b.vocab.size());
  return cfg;
}

int run(int argc, char** argv) {
  CLI::App app{"predicts Python parameter and return types from natural-language context"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  uint64_t seed = 1;
  bool deterministic = false;
  std::string workdir = ".";
  app.add_option("--seed", seed, "base random seed");
  app.add_flag("--deterministic", deterministic,
               "single-threaded bit-reproducible mode (always on; flag kept for scripts)");
  app.add_option("--workdir", workdir, "directory that relative paths resolve against");

  // extract
  auto* cmd_extract = app.add_subcommand("extract", "parse projects into functions.jsonl");
  std::string manifest_path, functions_out = "functions.jsonl";
  bool print_stats = false;
  cmd_extract->add_option("--manifest", manifest_path, "project manifest (id<TAB>root)")
      ->required();
  cmd_extract->add_option("--output", functions_out, "output functions.jsonl");
  cmd_extract->add_flag("--stats", print_stats, "print extraction statistics");

  // build
  auto* cmd_build = app.add_subcommand("build", "datapoints, embeddings, vocabulary, tensors");
  std::string functions_in = "functions.jsonl", build_out = "build_artifacts";
  int variant_id = 1;
  double split_ratio = 0.8;
  size_t vocab_cap = 1000;
  bool auto_dim = false;
  cmd_build->add_option("--functions", functions_in, "input functions.jsonl");
  cmd_build->add_option("--variant", variant_id, "dataset variant 1-5");
  cmd_build->add_option("--output", build_out, "output directory");
  cmd_build->add_option("--split", split_ratio, "train fraction");
  cmd_build->add_option("--vocab-cap", vocab_cap, "max type vocabulary size");
  cmd_build->add_flag("--auto-dim", auto_dim,
                      "derive the embedding dimension from the vocabulary size");

  // train-embeddings
  auto* cmd_emb = app.add_subcommand("train-embeddings", "skip-gram embeddings for one corpus");
  std::string points_in, emb_out = "embeddings.txt", emb_kind = "comments";
  int emb_dim = 14, emb_epochs = 15, emb_window = 5, emb_negatives = 5, emb_min_count = 5;
  cmd_emb->add_option("--datapoints", points_in, "datapoints.jsonl")->required();
  cmd_emb->add_option("--kind", emb_kind, "comments or identifiers");
  cmd_emb->add_option("--output", emb_out, "output embedding text file");
  cmd_emb->add_option("--dim", emb_dim, "embedding dimension (0 = fourth root of vocab)");
  cmd_emb->add_option("--epochs", emb_epochs, "training epochs");
  cmd_emb->add_option("--window", emb_window, "max context window");
  cmd_emb->add_option("--negatives", emb_negatives, "negative samples per position");
  cmd_emb->add_option("--min-count", emb_min_count, "exclude words occurring <= this");

  // train
  auto* cmd_train = app.add_subcommand("train", "train a classifier on a build directory");
  std::string train_build_dir, model_out = "model.ckpt", arch_name = "a";
  int epochs = 0, batch_size = 256;
  float learning_rate = 1e-3f;
  cmd_train->add_option("--build", train_build_dir, "build directory")->required();
  cmd_train->add_option("--arch", arch_name, "architecture: a, b or c");
  cmd_train->add_option("--output", model_out, "output checkpoint");
  cmd_train->add_option("--epochs", epochs, "epochs (0 = architecture default)");
  cmd_train->add_option("--batch-size", batch_size, "minibatch size");
  cmd_train->add_option("--lr", learning_rate, "learning rate");

  // predict
  auto* cmd_predict = app.add_subcommand("predict", "top-k predictions for the test split");
  std::string predict_build_dir, model_in;
  int top_k = 3;
  std::string predict_out;
  cmd_predict->add_option("--build", predict_build_dir, "build directory")->required();
  cmd_predict->add_option("--model", model_in, "trained checkpoint")->required();
  cmd_predict->add_option("--top-k", top_k, "predictions per datapoint");
  cmd_predict->add_option("--output", predict_out, "output jsonl (default: stdout)");

  // eval
  auto* cmd_eval = app.add_subcommand("eval", "train/evaluate over seeds and report metrics");
  std::string eval_build_dir, eval_arch = "a", seeds_csv, csv_out, eval_model;
  int eval_variant = 0, eval_epochs = 0, eval_batch = 256;
  float eval_lr = 1e-3f;
  cmd_eval->add_option("--build", eval_build_dir, "build directory")->required();
  cmd_eval->add_option("--arch", eval_arch, "architecture: a, b or c");
  cmd_eval->add_option("--model", eval_model,
                       "evaluate this checkpoint instead of retraining");
  cmd_eval->add_option("--variant", eval_variant, "variant id recorded in the report");
  cmd_eval->add_option("--seeds", seeds_csv, "comma-separated training seeds");
  cmd_eval->add_option("--epochs", eval_epochs, "epochs (0 = architecture default)");
  cmd_eval->add_option("--batch-size", eval_batch, "minibatch size");
  cmd_eval->add_option("--lr", eval_lr, "learning rate");
  cmd_eval->add_option("--csv", csv_out, "also write the report as csv");

  // stats
  auto* cmd_stats = app.add_subcommand("stats", "feature length statistics for datapoints");
  std::string stats_points;
  cmd_stats->add_option("--datapoints", stats_points, "datapoints.jsonl")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    int code = app.exit(err);
    return code == 0 ? 0 : 1;
  }

  fs::current_path(workdir);
  const auto& lex = nlp::Lexicon::default_instance();

  if (*cmd_extract) {
    extract::ensure_python_runtime();
    auto manifest = extract::load_manifest(manifest_path);
    extract::ExtractionStats stats;
    std::vector<extract::ParseFailure> failures;
    auto fns = extract::extract_corpus(manifest, stats, &failures);
    write_text_file(functions_out, extract::to_jsonl(fns));
    std::cerr << "extracted " << fns.size() << " functions from " << stats.files
              << " files (" << stats.parse_failed << " parse failures, "
              << stats.skipped_non_utf8 << " non-utf8 skipped)\n";
    if (print_stats) {
      for (const auto& f : failures)
        std::cerr << "  parse failure: " << f.project << ":" << f.path << ": " << f.message
                  << "\n";
      std::cerr << "functions with at least one annotation: " << stats.functions_with_types
                << "\norphan parameter comments: " << stats.orphan_param_comments << "\n";
    }
  } else if (*cmd_build) {
    pipeline::BuildConfig cfg;
    cfg.variant_id = variant_id;
    cfg.split_ratio = split_ratio;
    cfg.seed = seed;
    cfg.vocab_cap = vocab_cap;
    cfg.auto_dim = auto_dim;
    auto fns = extract::from_jsonl(read_text_file(functions_in));
    auto artifacts = pipeline::build_from_functions(fns, cfg, lex);
    pipeline::save_artifacts(build_out, artifacts, cfg, lex);
    std::cerr << "variant " << variant_id << ": " << artifacts.split.train.size()
              << " train / " << artifacts.split.test.size() << " test datapoints, "
              << artifacts.vocab.size() << " type classes, embedding dim "
              << artifacts.embedding_dim << "\n";
  } else if (*cmd_emb) {
    auto points = dataset::from_jsonl(read_text_file(points_in));
    auto corpora = embed::build_sentences(points);
    const embed::Corpus* corpus = nullptr;
    if (emb_kind == "comments")
      corpus = &corpora.comments;
    else if (emb_kind == "identifiers")
      corpus = &corpora.identifiers;
    else
      throw UsageError("--kind must be comments or identifiers");
    embed::EmbeddingConfig cfg;
    cfg.epochs = emb_epochs;
    cfg.window = emb_window;
    cfg.negatives = emb_negatives;
    cfg.min_count_exclusive = emb_min_count;
    cfg.seed = seed;
    int dim = emb_dim;
    if (dim == 0) {
      std::unordered_set<std::string> uniq;
      for (const auto& sentence : *corpus) uniq.insert(sentence.begin(), sentence.end());
      dim = embed::embedding_dim(uniq.size());
    }
    auto model = embed::train_embeddings(*corpus, dim, cfg);
    model.save(emb_out);
    std::cerr << "trained " << model.vocab_size() << " vectors of dimension " << model.dim()
              << "\n";
  } else if (*cmd_train) {
    auto build = load_build_dir(train_build_dir);
    neural::Arch arch = neural::arch_from_string(arch_name);
    auto cfg = model_config_for(arch, build);
    neural::TrainConfig tc;
    tc.epochs = epochs > 0 ? epochs : neural::default_epochs(arch);
    tc.batch_size = batch_size;
    tc.learning_rate = learning_rate;
    tc.seed = seed;
    auto model = neural::train(cfg, tc, build.train_tensors, build.train_labels,
                               build.vocab.hash());
    neural::save_checkpoint(model_out, model);
    std::cerr << "trained arch " << neural::arch_to_string(arch) << " for " << tc.epochs
              << " epochs; final loss " << model.epoch_losses.back() << "\n";
  } else if (*cmd_predict) {
    auto build = load_build_dir(predict_build_dir);
    auto model = neural::load_checkpoint(model_in, build.vocab.hash());
    auto probs = neural::predict_probs(model.classifier, build.test_tensors);
    std::ostringstream out;
    for (Eigen::Index r = 0; r < probs.rows(); ++r) {
      nlohmann::json row;
      row["index"] = r;
      row["label"] = build.vocab.type_at(build.test_labels[r]);
      nlohmann::json preds = nlohmann::json::array();
      for (const auto& p : neural::predict_top_k(probs, r, top_k, build.vocab)) {
        preds.push_back({{"type", p.type}, {"probability", p.probability}});
      }
      row["predictions"] = preds;
      out << row.dump() << "\n";
    }
    if (predict_out.empty())
      std::cout << out.str();
    else
      write_text_file(predict_out, out.str());
  } else if (*cmd_eval) {
    auto build = load_build_dir(eval_build_dir);
    std::vector<eval::EvalReport> reports;
    if (!eval_model.empty()) {
      auto model = neural::load_checkpoint(eval_model, build.vocab.hash());
      auto probs = neural::predict_probs(model.classifier, build.test_tensors);
      auto report = eval::evaluate(probs, build.test_labels, build.vocab.other_index());
      report.arch = neural::arch_to_string(model.classifier.config().arch);
      report.variant = eval_variant;
      report.seed = model.seed;
      reports.push_back(report);
    } else {
      neural::Arch arch = neural::arch_from_string(eval_arch);
      eval::ExperimentInput input;
      input.train_tensors = std::move(build.train_tensors);
      input.train_labels = std::move(build.train_labels);
      input.test_tensors = std::move(build.test_tensors);
      input.test_labels = std::move(build.test_labels);
      input.other_index = build.vocab.other_index();
      input.vocab_hash = build.vocab.hash();
      neural::TrainConfig tc;
      tc.epochs = eval_epochs > 0 ? eval_epochs : neural::default_epochs(arch);
      tc.batch_size = eval_batch;
      tc.learning_rate = eval_lr;
      std::vector<uint64_t> seeds = seeds_csv.empty() ? std::vector<uint64_t>{seed}
                                                      : parse_seeds(seeds_csv);
      reports.push_back(eval::run_experiment(arch, eval_variant, input, tc, seeds));
    }
    std::cout << eval::report_table(reports);
    if (!csv_out.empty()) write_text_file(csv_out, eval::report_csv(reports));
  } else if (*cmd_stats) {
    auto points = dataset::from_jsonl(read_text_file(stats_points));
    std::cout << eval::feature_stats_table(eval::feature_length_stats(points));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  } catch (const DataError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const NumericError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 3;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
}
