#include <pybind11/embed.h>

#include <algorithm>
#include <functional>

#include "typenet/common.hpp"
#include "typenet/extract.hpp"

namespace py = pybind11;

namespace typenet::extract {

namespace {

py::module_& ast_mod() {
  // leaked on purpose: a static py::module_ would be destroyed after the
  // host interpreter has already finalized
  static py::module_* mod = new py::module_(py::module_::import("ast"));
  return *mod;
}

bool isa(py::handle node, const char* type) {
  return py::isinstance(node, ast_mod().attr(type));
}

std::optional<std::string> annotation_string(py::handle ann) {
  if (!ann || ann.is_none()) return std::nullopt;
  if (isa(ann, "Constant")) {
    py::object v = ann.attr("value");
    // quoted forward reference: strip the one level of quotes
    if (py::isinstance<py::str>(v)) return collapse_whitespace(v.cast<std::string>());
  }
  std::string text = ast_mod().attr("unparse")(ann).cast<std::string>();
  return collapse_whitespace(text);
}

// In-order identifiers and Python keywords of an expression; literals and
// operators are dropped.
void expr_tokens(py::handle node, std::vector<std::string>& out) {
  auto visit_all = [&](py::handle seq) {
    for (py::handle child : seq) expr_tokens(child, out);
  };
  if (isa(node, "Name")) {
    out.push_back(node.attr("id").cast<std::string>());
  } else if (isa(node, "Attribute")) {
    expr_tokens(node.attr("value"), out);
    out.push_back(node.attr("attr").cast<std::string>());
  } else if (isa(node, "Constant")) {
    py::object v = node.attr("value");
    if (v.is_none())
      out.push_back("None");
    else if (py::isinstance<py::bool_>(v))
      out.push_back(v.cast<bool>() ? "True" : "False");
  } else if (isa(node, "IfExp")) {
    expr_tokens(node.attr("body"), out);
    out.push_back("if");
    expr_tokens(node.attr("test"), out);
    out.push_back("else");
    expr_tokens(node.attr("orelse"), out);
  } else if (isa(node, "BoolOp")) {
    const char* word = isa(node.attr("op"), "And") ? "and" : "or";
    bool first = true;
    for (py::handle v : node.attr("values")) {
      if (!first) out.push_back(word);
      first = false;
      expr_tokens(v, out);
    }
  } else if (isa(node, "UnaryOp")) {
    if (isa(node.attr("op"), "Not")) out.push_back("not");
    expr_tokens(node.attr("operand"), out);
  } else if (isa(node, "Compare")) {
    expr_tokens(node.attr("left"), out);
    py::list ops = node.attr("ops");
    py::list comparators = node.attr("comparators");
    for (size_t i = 0; i < ops.size(); ++i) {
      py::handle op = ops[i];
      if (isa(op, "In")) {
        out.push_back("in");
      } else if (isa(op, "NotIn")) {
        out.push_back("not");
        out.push_back("in");
      } else if (isa(op, "Is")) {
        out.push_back("is");
      } else if (isa(op, "IsNot")) {
        out.push_back("is");
        out.push_back("not");
      }
      expr_tokens(comparators[i], out);
    }
  } else if (isa(node, "Lambda")) {
    out.push_back("lambda");
    py::handle args = node.attr("args");
    for (const char* field : {"posonlyargs", "args", "kwonlyargs"})
      for (py::handle a : args.attr(field)) out.push_back(a.attr("arg").cast<std::string>());
    if (!args.attr("vararg").is_none()) out.push_back(args.attr("vararg").attr("arg").cast<std::string>());
    if (!args.attr("kwarg").is_none()) out.push_back(args.attr("kwarg").attr("arg").cast<std::string>());
    expr_tokens(node.attr("body"), out);
  } else if (isa(node, "Call")) {
    expr_tokens(node.attr("func"), out);
    visit_all(node.attr("args"));
    for (py::handle kw : node.attr("keywords")) {
      py::handle arg = kw.attr("arg");
      if (!arg.is_none()) out.push_back(arg.cast<std::string>());
      expr_tokens(kw.attr("value"), out);
    }
  } else if (isa(node, "ListComp") || isa(node, "SetComp") || isa(node, "GeneratorExp") ||
             isa(node, "DictComp")) {
    if (isa(node, "DictComp")) {
      expr_tokens(node.attr("key"), out);
      expr_tokens(node.attr("value"), out);
    } else {
      expr_tokens(node.attr("elt"), out);
    }
    for (py::handle gen : node.attr("generators")) {
      out.push_back("for");
      expr_tokens(gen.attr("target"), out);
      out.push_back("in");
      expr_tokens(gen.attr("iter"), out);
      for (py::handle cond : gen.attr("ifs")) {
        out.push_back("if");
        expr_tokens(cond, out);
      }
    }
  } else if (isa(node, "Await")) {
    out.push_back("await");
    expr_tokens(node.attr("value"), out);
  } else if (isa(node, "Yield")) {
    out.push_back("yield");
    if (!node.attr("value").is_none()) expr_tokens(node.attr("value"), out);
  } else if (isa(node, "YieldFrom")) {
    out.push_back("yield");
    out.push_back("from");
    expr_tokens(node.attr("value"), out);
  } else {
    // BinOp, Subscript, Tuple, List, Set, Dict, Starred, JoinedStr, ... --
    // field order of iter_child_nodes matches source order
    for (py::handle child : ast_mod().attr("iter_child_nodes")(node)) expr_tokens(child, out);
  }
}

void collect_returns(py::handle node, std::vector<std::vector<std::string>>& out) {
  for (py::handle child : ast_mod().attr("iter_child_nodes")(node)) {
    if (isa(child, "FunctionDef") || isa(child, "AsyncFunctionDef") || isa(child, "ClassDef") ||
        isa(child, "Lambda"))
      continue;  // returns of nested definitions belong to those definitions
    if (isa(child, "Return")) {
      py::handle value = child.attr("value");
      if (!value.is_none()) {
        std::vector<std::string> tokens;
        expr_tokens(value, tokens);
        if (!tokens.empty()) out.push_back(std::move(tokens));
      }
      continue;
    }
    collect_returns(child, out);
  }
}

RawFunction build_function(py::handle node, const std::string& project, const std::string& path,
                           const std::string& qualname, ExtractionStats* stats) {
  RawFunction fn;
  fn.project = project;
  fn.path = path;
  fn.qualname = qualname;
  fn.line = node.attr("lineno").cast<int>();
  fn.name = node.attr("name").cast<std::string>();

  py::handle args = node.attr("args");
  auto add_param = [&](py::handle a) {
    fn.params.push_back(a.attr("arg").cast<std::string>());
    fn.param_types.push_back(annotation_string(a.attr("annotation")));
    fn.param_comments.push_back(std::nullopt);
  };
  for (const char* field : {"posonlyargs", "args"})
    for (py::handle a : args.attr(field)) add_param(a);
  if (!args.attr("vararg").is_none()) add_param(args.attr("vararg"));
  for (py::handle a : args.attr("kwonlyargs")) add_param(a);
  if (!args.attr("kwarg").is_none()) add_param(args.attr("kwarg"));

  fn.return_type = annotation_string(node.attr("returns"));
  collect_returns(node, fn.return_exprs);

  py::object doc = ast_mod().attr("get_docstring")(node);
  if (!doc.is_none()) {
    fn.docstring = doc.cast<std::string>();
    DocstringInfo info = parse_docstring(*fn.docstring);
    if (info.style != DocstringInfo::Style::Unstructured) {
      if (!info.description.empty()) fn.fn_comment = info.description;
      fn.return_comment = info.return_comment;
      for (size_t i = 0; i < fn.params.size(); ++i) {
        if (const std::string* c = info.find_param(fn.params[i]))
          if (!c->empty()) fn.param_comments[i] = *c;
      }
      if (stats) {
        for (const auto& [name, comment] : info.param_comments) {
          bool known = std::find(fn.params.begin(), fn.params.end(), name) != fn.params.end();
          if (!known) ++stats->orphan_param_comments;
        }
      }
    }
  }

  if (stats) {
    ++stats->functions;
    bool typed = fn.return_type.has_value() ||
                 std::any_of(fn.param_types.begin(), fn.param_types.end(),
                             [](const auto& t) { return t.has_value(); });
    if (typed) ++stats->functions_with_types;
  }
  return fn;
}

void walk_statements(py::handle node, const std::string& project, const std::string& path,
                     const std::string& prefix, std::vector<RawFunction>& out,
                     ExtractionStats* stats) {
  for (py::handle child : ast_mod().attr("iter_child_nodes")(node)) {
    if (isa(child, "FunctionDef") || isa(child, "AsyncFunctionDef")) {
      std::string name = child.attr("name").cast<std::string>();
      std::string qual = prefix.empty() ? name : prefix + "." + name;
      out.push_back(build_function(child, project, path, qual, stats));
      walk_statements(child, project, path, qual, out, stats);
    } else if (isa(child, "ClassDef")) {
      std::string name = child.attr("name").cast<std::string>();
      std::string qual = prefix.empty() ? name : prefix + "." + name;
      walk_statements(child, project, path, qual, out, stats);
    } else if (isa(child, "Lambda")) {
      continue;
    } else {
      walk_statements(child, project, path, prefix, out, stats);
    }
  }
}

}  // namespace

void ensure_python_runtime() {
  if (!Py_IsInitialized()) {
    py::initialize_interpreter();
    // left running for the lifetime of the process
  }
}

std::variant<Ast, ParseFailure> parse_module(const SourceFile& source) {
  ensure_python_runtime();
  try {
    py::object tree = ast_mod().attr("parse")(source.text);
    auto holder = std::shared_ptr<void>(new py::object(std::move(tree)),
                                        [](void* p) { delete static_cast<py::object*>(p); });
    return Ast{std::move(holder), source.project_id, source.relative_path};
  } catch (py::error_already_set& e) {
    return ParseFailure{source.project_id, source.relative_path, e.what()};
  }
}

std::vector<RawFunction> extract_functions(const Ast& ast, ExtractionStats* stats) {
  ensure_python_runtime();
  py::handle tree = *static_cast<py::object*>(ast.tree.get());
  std::vector<RawFunction> out;
  walk_statements(tree, ast.project, ast.path, "", out, stats);
  return out;
}

std::vector<std::string> return_expression_tokens(const std::string& expression_source) {
  ensure_python_runtime();
  py::object tree = ast_mod().attr("parse")(expression_source, "<expr>", "eval");
  std::vector<std::string> tokens;
  expr_tokens(tree.attr("body"), tokens);
  return tokens;
}

}  // namespace typenet::extract
