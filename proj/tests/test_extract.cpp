#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "typenet/common.hpp"
#include "typenet/extract.hpp"

using namespace typenet;
using namespace typenet::extract;
namespace fs = std::filesystem;

namespace {

fs::path make_temp_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("typenet_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<RawFunction> extract_source(const std::string& code) {
  SourceFile src{"p", "m.py", code};
  auto parsed = parse_module(src);
  REQUIRE(std::holds_alternative<Ast>(parsed));
  return extract_functions(std::get<Ast>(parsed));
}

}  // namespace

TEST_CASE("manifest parsing") {
  fs::path dir = make_temp_dir("manifest");
  fs::create_directories(dir / "a");
  fs::create_directories(dir / "b");

  SUBCASE("well-formed") {
    write_text_file((dir / "m.tsv").string(),
                    "# comment\np1\t" + (dir / "a").string() + "\n\np2\t" +
                        (dir / "b").string() + "\n");
    auto m = load_manifest((dir / "m.tsv").string());
    REQUIRE(m.entries.size() == 2);
    CHECK(m.entries[0].project_id == "p1");
    CHECK(m.entries[1].project_id == "p2");
  }
  SUBCASE("duplicate project id rejected") {
    write_text_file((dir / "dup.tsv").string(),
                    "p1\t" + (dir / "a").string() + "\np1\t" + (dir / "b").string() + "\n");
    CHECK_THROWS_AS(load_manifest((dir / "dup.tsv").string()), DataError);
  }
  SUBCASE("missing root rejected") {
    write_text_file((dir / "gone.tsv").string(), "p1\t" + (dir / "nope").string() + "\n");
    CHECK_THROWS_AS(load_manifest((dir / "gone.tsv").string()), DataError);
  }
  SUBCASE("malformed line rejected") {
    write_text_file((dir / "bad.tsv").string(), "p1-no-tab\n");
    CHECK_THROWS_AS(load_manifest((dir / "bad.tsv").string()), DataError);
  }
}

TEST_CASE("source enumeration") {
  fs::path dir = make_temp_dir("enum");
  fs::create_directories(dir / "proj" / "sub");
  write_text_file((dir / "proj" / "b.py").string(), "x = 1\n");
  write_text_file((dir / "proj" / "a.py").string(), "y = 2\n");
  write_text_file((dir / "proj" / "sub" / "c.py").string(), "z = 3\n");
  write_text_file((dir / "proj" / "notes.txt").string(), "ignored\n");
  {
    std::ofstream bad(dir / "proj" / "bad.py", std::ios::binary);
    bad << "x = '\xff\xfe'\n";
  }

  ProjectManifest m{{{"proj", (dir / "proj").string()}}};
  auto result = enumerate_sources(m);
  REQUIRE(result.files.size() == 3);
  CHECK(result.files[0].relative_path == "a.py");
  CHECK(result.files[1].relative_path == "b.py");
  CHECK(result.files[2].relative_path == "sub/c.py");
  CHECK(result.skipped_non_utf8 == 1);
}

TEST_CASE("basic function extraction") {
  auto fns = extract_source("def f(x: int) -> str:\n    return 'a'\n");
  REQUIRE(fns.size() == 1);
  const auto& f = fns[0];
  CHECK(f.name == "f");
  CHECK(f.qualname == "f");
  CHECK(f.line == 1);
  REQUIRE(f.params.size() == 1);
  CHECK(f.params[0] == "x");
  CHECK(f.param_types[0] == "int");
  CHECK(f.return_type == "str");
  CHECK(f.return_exprs.empty());  // pure literal return yields no tokens
  CHECK(!f.docstring.has_value());
}

TEST_CASE("syntax error becomes ParseFailure") {
  SourceFile src{"p", "m.py", "def f(:\n"};
  auto parsed = parse_module(src);
  REQUIRE(std::holds_alternative<ParseFailure>(parsed));
  CHECK(!std::get<ParseFailure>(parsed).message.empty());
}

TEST_CASE("method extraction with qualname and attribute returns") {
  auto fns = extract_source(
      "class Person:\n"
      "    def full_name(self, name: str):\n"
      "        return self.first + ' ' + name\n");
  REQUIRE(fns.size() == 1);
  const auto& f = fns[0];
  CHECK(f.qualname == "Person.full_name");
  REQUIRE(f.params.size() == 2);
  CHECK(f.params[0] == "self");
  CHECK(!f.param_types[0].has_value());
  CHECK(f.param_types[1] == "str");
  REQUIRE(f.return_exprs.size() == 1);
  CHECK(f.return_exprs[0] == std::vector<std::string>{"self", "first", "name"});
}

TEST_CASE("return expression handling") {
  SUBCASE("bare return and None annotation") {
    auto fns = extract_source("def f() -> None:\n    return\n");
    REQUIRE(fns.size() == 1);
    CHECK(fns[0].return_type == "None");
    CHECK(fns[0].return_exprs.empty());
  }
  SUBCASE("nested defs are not scanned") {
    auto fns = extract_source(
        "def outer():\n"
        "    def inner():\n"
        "        return hidden\n"
        "    return visible\n");
    REQUIRE(fns.size() == 2);
    for (const auto& f : fns) {
      if (f.name == "outer") {
        REQUIRE(f.return_exprs.size() == 1);
        CHECK(f.return_exprs[0] == std::vector<std::string>{"visible"});
      }
      if (f.name == "inner") {
        REQUIRE(f.return_exprs.size() == 1);
        CHECK(f.return_exprs[0] == std::vector<std::string>{"hidden"});
      }
    }
  }
}

TEST_CASE("return_expression_tokens") {
  using V = std::vector<std::string>;
  CHECK(return_expression_tokens("a + b") == V{"a", "b"});
  CHECK(return_expression_tokens("x if flag else None") ==
        V{"x", "if", "flag", "else", "None"});
  CHECK(return_expression_tokens("42") == V{});
  CHECK(return_expression_tokens("'text'") == V{});
  CHECK(return_expression_tokens("self.first + ' ' + name") ==
        V{"self", "first", "name"});
  CHECK(return_expression_tokens("len(items)") == V{"len", "items"});
  CHECK(return_expression_tokens("not done") == V{"not", "done"});
  CHECK(return_expression_tokens("key in mapping") == V{"key", "in", "mapping"});
  CHECK(return_expression_tokens("x is not None") == V{"x", "is", "not", "None"});
  CHECK(return_expression_tokens("[v for v in items if v]") ==
        V{"v", "for", "v", "in", "items", "if", "v"});
  CHECK(return_expression_tokens("f(x, key=y)") == V{"f", "x", "key", "y"});
  CHECK(return_expression_tokens("True") == V{"True"});
}

TEST_CASE("docstring styles") {
  SUBCASE("ReST") {
    auto info = parse_docstring(
        "Adds two numbers.\n"
        "\n"
        ":param a: the first operand\n"
        ":param b: the second operand,\n"
        "    possibly negative\n"
        ":return: the sum\n");
    CHECK(info.style == DocstringInfo::Style::ReST);
    CHECK(info.description == "Adds two numbers.");
    REQUIRE(info.param_comments.size() == 2);
    CHECK(*info.find_param("a") == "the first operand");
    CHECK(*info.find_param("b") == "the second operand, possibly negative");
    REQUIRE(info.return_comment.has_value());
    CHECK(*info.return_comment == "the sum");
  }
  SUBCASE("Google") {
    auto info = parse_docstring(
        "Adds two numbers.\n"
        "\n"
        "Args:\n"
        "    a: the first operand\n"
        "    b (int): the second operand\n"
        "\n"
        "Returns:\n"
        "    the sum\n");
    CHECK(info.style == DocstringInfo::Style::Google);
    CHECK(*info.find_param("a") == "the first operand");
    CHECK(*info.find_param("b") == "the second operand");
    CHECK(*info.return_comment == "the sum");
  }
  SUBCASE("NumPy") {
    auto info = parse_docstring(
        "Adds two numbers.\n"
        "\n"
        "Parameters\n"
        "----------\n"
        "a : int\n"
        "    the first operand\n"
        "b : int\n"
        "    the second operand\n"
        "\n"
        "Returns\n"
        "-------\n"
        "int\n"
        "    the sum\n");
    CHECK(info.style == DocstringInfo::Style::Numpy);
    CHECK(*info.find_param("a") == "the first operand");
    CHECK(*info.find_param("b") == "the second operand");
    CHECK(*info.return_comment == "the sum");
  }
  SUBCASE("unstructured") {
    auto info = parse_docstring("Just a description.\nSecond line.");
    CHECK(info.style == DocstringInfo::Style::Unstructured);
    CHECK(info.param_comments.empty());
    CHECK(!info.return_comment.has_value());
    CHECK(!info.description.empty());
  }
}

TEST_CASE("docstring merge into function record") {
  auto fns = extract_source(
      "def add(a: int, b: int) -> int:\n"
      "    \"\"\"Adds two numbers.\n"
      "\n"
      "    :param a: the first operand\n"
      "    :param c: orphan comment\n"
      "    :return: the sum\n"
      "    \"\"\"\n"
      "    return a + b\n");
  REQUIRE(fns.size() == 1);
  const auto& f = fns[0];
  CHECK(f.fn_comment == "Adds two numbers.");
  REQUIRE(f.param_comments.size() == 2);
  CHECK(f.param_comments[0] == "the first operand");
  CHECK(!f.param_comments[1].has_value());  // b has no comment
  CHECK(f.return_comment == "the sum");
}

TEST_CASE("annotation rendering") {
  auto fns = extract_source(
      "def f(m: Dict[str,   int], s: 'List[str]') -> Optional[int]:\n"
      "    return m\n");
  REQUIRE(fns.size() == 1);
  CHECK(fns[0].param_types[0] == "Dict[str, int]");
  CHECK(fns[0].param_types[1] == "List[str]");  // quoted annotation unwrapped
  CHECK(fns[0].return_type == "Optional[int]");
}

TEST_CASE("parameter kinds are captured in order") {
  auto fns = extract_source(
      "def f(a, /, b, *args, c, **kwargs):\n    return a\n");
  REQUIRE(fns.size() == 1);
  CHECK(fns[0].params ==
        std::vector<std::string>{"a", "b", "args", "c", "kwargs"});
}

TEST_CASE("corpus extraction and jsonl round trip") {
  fs::path dir = make_temp_dir("corpus");
  fs::create_directories(dir / "p");
  write_text_file((dir / "p" / "a.py").string(),
                  "def f(x: int) -> int:\n    return x\n");
  write_text_file((dir / "p" / "b.py").string(), "def broken(:\n");

  ProjectManifest m{{{"p", (dir / "p").string()}}};
  ExtractionStats stats;
  std::vector<ParseFailure> failures;
  auto fns = extract_corpus(m, stats, &failures);

  CHECK(stats.files == 2);
  CHECK(stats.parsed == 1);
  CHECK(stats.parse_failed == 1);
  REQUIRE(failures.size() == 1);
  CHECK(failures[0].path == "b.py");
  REQUIRE(fns.size() == 1);
  CHECK(fns[0].project == "p");
  CHECK(fns[0].path == "a.py");

  std::string jsonl = to_jsonl(fns);
  auto back = from_jsonl(jsonl);
  REQUIRE(back.size() == fns.size());
  CHECK(back[0].name == fns[0].name);
  CHECK(back[0].param_types == fns[0].param_types);
  CHECK(back[0].return_exprs == fns[0].return_exprs);
  CHECK(to_jsonl(back) == jsonl);

  ExtractionStats stats2;
  auto fns2 = extract_corpus(m, stats2, nullptr);
  CHECK(to_jsonl(fns2) == jsonl);  // deterministic
}

TEST_CASE("jsonl with inconsistent parallel lists rejected") {
  std::string line =
      R"({"project":"p","path":"a.py","qualname":"f","line":1,"name":"f",)"
      R"("docstring":null,"fn_comment":null,"params":["x"],"param_types":[],)"
      R"("param_comments":[null],"return_exprs":[],"return_type":null,)"
      R"("return_comment":null})";
  CHECK_THROWS_AS(from_jsonl(line + "\n"), DataError);
}
