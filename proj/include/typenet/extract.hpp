#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace typenet::extract {

struct ProjectManifest {
  struct Entry {
    std::string project_id;
    std::string root;
  };
  std::vector<Entry> entries;
};

// Line-oriented manifest: `<project_id><TAB><root-path>`, `#` comments.
ProjectManifest load_manifest(const std::string& path);

struct SourceFile {
  std::string project_id;
  std::string relative_path;  // ends in .py
  std::string text;           // valid UTF-8
};

struct EnumerationResult {
  std::vector<SourceFile> files;  // sorted by (project_id, relative_path)
  size_t skipped_non_utf8 = 0;
};

EnumerationResult enumerate_sources(const ProjectManifest& manifest);

struct DocstringInfo {
  enum class Style { ReST, Google, Numpy, Unstructured };
  Style style = Style::Unstructured;
  std::string description;
  // in docstring order; keys are parameter names
  std::vector<std::pair<std::string, std::string>> param_comments;
  std::optional<std::string> return_comment;

  const std::string* find_param(const std::string& name) const {
    for (const auto& [k, v] : param_comments)
      if (k == name) return &v;
    return nullptr;
  }
};

// Recognizes ReST (:param x:), Google (Args:/Returns:) and NumPy
// (Parameters / ----------) docstrings; anything else degrades to
// Unstructured with only the description set.
DocstringInfo parse_docstring(const std::string& docstring);

// The nine extracted elements plus provenance. Parallel lists share length.
struct RawFunction {
  std::string project;
  std::string path;
  std::string qualname;
  int line = 0;

  std::string name;                                        // n_f
  std::optional<std::string> docstring;                    // d_f
  std::optional<std::string> fn_comment;                   // c_f
  std::vector<std::string> params;                         // n_p
  std::vector<std::optional<std::string>> param_types;     // t_p
  std::vector<std::optional<std::string>> param_comments;  // c_p
  std::vector<std::vector<std::string>> return_exprs;      // e_r, entries non-empty
  std::optional<std::string> return_type;                  // t_r
  std::optional<std::string> return_comment;               // c_r
};

struct ParseFailure {
  std::string project;
  std::string path;
  std::string message;
};

// Opaque handle to a parsed CPython AST.
struct Ast {
  std::shared_ptr<void> tree;
  std::string project;
  std::string path;
};

struct ExtractionStats {
  size_t files = 0;
  size_t parsed = 0;
  size_t parse_failed = 0;
  size_t skipped_non_utf8 = 0;
  size_t functions = 0;
  size_t functions_with_types = 0;
  size_t orphan_param_comments = 0;
};

// Initializes an embedded CPython interpreter on first use (no-op when one
// is already running, e.g. inside the extension module).
void ensure_python_runtime();

std::variant<Ast, ParseFailure> parse_module(const SourceFile& source);

std::vector<RawFunction> extract_functions(const Ast& ast, ExtractionStats* stats = nullptr);

// In-order identifiers and keywords of a single return expression; literals
// and operators excluded. `expression_source` is parsed in eval mode.
std::vector<std::string> return_expression_tokens(const std::string& expression_source);

// Full corpus run: enumerate, parse, extract. Failures are recorded in the
// stats and in `failures`, never fatal.
std::vector<RawFunction> extract_corpus(const ProjectManifest& manifest, ExtractionStats& stats,
                                        std::vector<ParseFailure>* failures = nullptr);

// functions.jsonl round trip
std::string to_jsonl(const std::vector<RawFunction>& fns);
std::vector<RawFunction> from_jsonl(const std::string& jsonl);

}  // namespace typenet::extract
