#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "typenet/embed.hpp"
#include "typenet/eval.hpp"
#include "typenet/extract.hpp"
#include "typenet/neural.hpp"
#include "typenet/nlp.hpp"
#include "typenet/vectorize.hpp"

namespace py = pybind11;
using namespace typenet;

namespace {

neural::Mat<float> to_matrix(const py::array_t<float, py::array::c_style | py::array::forcecast>& arr) {
  if (arr.ndim() != 2) throw DataError("expected a 2-d array");
  neural::Mat<float> m(arr.shape(0), arr.shape(1));
  std::memcpy(m.data(), arr.data(), sizeof(float) * m.size());
  return m;
}

std::vector<vectorize::Matrix> to_tensor_list(
    const py::array_t<float, py::array::c_style | py::array::forcecast>& arr) {
  if (arr.ndim() != 3) throw DataError("expected an array of shape (n, seq_len, dim)");
  std::vector<vectorize::Matrix> tensors;
  auto view = arr.unchecked<3>();
  for (py::ssize_t i = 0; i < view.shape(0); ++i) {
    vectorize::Matrix m(view.shape(1), view.shape(2));
    for (py::ssize_t r = 0; r < view.shape(1); ++r)
      for (py::ssize_t c = 0; c < view.shape(2); ++c) m(r, c) = view(i, r, c);
    tensors.push_back(std::move(m));
  }
  return tensors;
}

py::array_t<float> from_matrix(const neural::Mat<float>& m) {
  py::array_t<float> out({m.rows(), m.cols()});
  std::memcpy(out.mutable_data(), m.data(), sizeof(float) * m.size());
  return out;
}

py::dict report_to_dict(const eval::EvalReport& report) {
  py::dict out;
  out["p"] = report.counts.p;
  out["p_valid"] = report.counts.p_valid;
  out["p_valid_correct"] = report.counts.p_valid_correct;
  py::list at_k;
  for (const auto& m : report.at_k) {
    py::dict entry;
    entry["precision"] = m.precision;
    entry["recall"] = m.recall;
    entry["f1"] = m.f1;
    at_k.append(entry);
  }
  out["at_k"] = at_k;
  out["zero_valid"] = report.zero_valid;
  return out;
}

// Thin training wrapper used by the python smoke tests; tensors are a
// single (n, seq_len, dim) float array.
class Classifier {
 public:
  Classifier(const std::string& arch, int input_dim, int seq_len, int output_dim)
      : arch_(neural::arch_from_string(arch)), input_dim_(input_dim), seq_len_(seq_len),
        output_dim_(output_dim) {}

  std::vector<double> train(
      const py::array_t<float, py::array::c_style | py::array::forcecast>& tensors,
      const std::vector<uint32_t>& labels, int epochs, int batch_size, float lr,
      uint64_t seed) {
    neural::ModelConfig cfg;
    cfg.arch = arch_;
    cfg.input_dim = input_dim_;
    cfg.seq_len = seq_len_;
    cfg.output_dim = output_dim_;
    neural::TrainConfig tc;
    tc.epochs = epochs;
    tc.batch_size = batch_size;
    tc.learning_rate = lr;
    tc.seed = seed;
    model_ = neural::train(cfg, tc, to_tensor_list(tensors), labels, /*vocab_hash=*/0);
    trained_ = true;
    return model_.epoch_losses;
  }

  py::array_t<float> predict_probs(
      const py::array_t<float, py::array::c_style | py::array::forcecast>& tensors) {
    if (!trained_) throw UsageError("train() must be called first");
    return from_matrix(neural::predict_probs(model_.classifier, to_tensor_list(tensors)));
  }

  int64_t param_count() {
    if (!trained_) throw UsageError("train() must be called first");
    return model_.classifier.actual_param_count();
  }

 private:
  neural::Arch arch_;
  int input_dim_, seq_len_, output_dim_;
  neural::TrainedModel model_;
  bool trained_ = false;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "type prediction from natural-language context";

  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  m.def("normalize_text", &nlp::normalize_text, py::arg("text"));
  m.def("split_identifier", &nlp::split_identifier, py::arg("name"));
  m.def(
      "preprocess_comment",
      [](const std::string& text) {
        return nlp::preprocess_comment(text, nlp::Lexicon::default_instance()).tokens;
      },
      py::arg("text"));
  m.def(
      "preprocess_identifier",
      [](const std::string& name) {
        return nlp::preprocess_identifier(name, nlp::Lexicon::default_instance()).tokens;
      },
      py::arg("name"));

  m.def("embedding_dim", &embed::embedding_dim, py::arg("unique_word_count"));
  m.def("gate_param_count", &neural::gate_param_count, py::arg("kind"), py::arg("input"),
        py::arg("hidden"));
  m.def(
      "param_count",
      [](const std::string& arch, int output_dim) {
        neural::ModelConfig cfg;
        cfg.arch = neural::arch_from_string(arch);
        cfg.output_dim = output_dim;
        return neural::param_count(cfg);
      },
      py::arg("arch"), py::arg("output_dim"));
  m.def("default_epochs",
        [](const std::string& arch) { return neural::default_epochs(neural::arch_from_string(arch)); });

  m.def(
      "extract_functions_jsonl",
      [](const std::string& source) {
        extract::SourceFile src{"inline", "inline.py", source};
        auto parsed = extract::parse_module(src);
        if (std::holds_alternative<extract::ParseFailure>(parsed))
          throw DataError("parse failure: " + std::get<extract::ParseFailure>(parsed).message);
        return extract::to_jsonl(extract::extract_functions(std::get<extract::Ast>(parsed)));
      },
      py::arg("source"), "extract the function tuples of a source string as jsonl");

  m.def("return_expression_tokens", &extract::return_expression_tokens, py::arg("expression"));

  py::class_<vectorize::TypeVocabulary>(m, "TypeVocabulary")
      .def(py::init<std::vector<std::string>>(), py::arg("types"))
      .def_property_readonly("types", &vectorize::TypeVocabulary::types)
      .def("__len__", &vectorize::TypeVocabulary::size)
      .def("index_of", &vectorize::TypeVocabulary::index_of, py::arg("label"))
      .def("type_at", &vectorize::TypeVocabulary::type_at, py::arg("index"))
      .def_property_readonly("other_index", &vectorize::TypeVocabulary::other_index)
      .def_property_readonly("hash", &vectorize::TypeVocabulary::hash);

  m.def(
      "encode_type",
      [](const vectorize::TypeVocabulary& vocab, const std::string& label) {
        return vectorize::encode_type(vocab, label);
      },
      py::arg("vocab"), py::arg("label"));

  m.def(
      "evaluate",
      [](const py::array_t<float, py::array::c_style | py::array::forcecast>& probs,
         const std::vector<uint32_t>& labels, size_t other_index) {
        return report_to_dict(eval::evaluate(to_matrix(probs), labels, other_index));
      },
      py::arg("probs"), py::arg("labels"), py::arg("other_index"));

  py::class_<Classifier>(m, "Classifier")
      .def(py::init<const std::string&, int, int, int>(), py::arg("arch"), py::arg("input_dim"),
           py::arg("seq_len"), py::arg("output_dim"))
      .def("train", &Classifier::train, py::arg("tensors"), py::arg("labels"),
           py::arg("epochs") = 10, py::arg("batch_size") = 32, py::arg("lr") = 1e-3f,
           py::arg("seed") = 1)
      .def("predict_probs", &Classifier::predict_probs, py::arg("tensors"))
      .def("param_count", &Classifier::param_count);

  m.attr("SEQ_LEN") = vectorize::kSeqLen;
  m.attr("SEQ_LEN_NO_RETURN_EXPRS") = vectorize::kSeqLenNoReturnExprs;
  m.attr("EMBEDDING_DIM") = vectorize::kEmbeddingDim;
}
