#include "typenet/extract.hpp"

#include <algorithm>
#include <filesystem>
#include <set>
#include <sstream>

#include "json.hpp"
#include "typenet/common.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace typenet::extract {

ProjectManifest load_manifest(const std::string& path) {
  if (!fs::exists(path)) throw DataError("manifest not found: " + path);
  ProjectManifest manifest;
  std::set<std::string> seen;
  std::istringstream in(read_text_file(path));
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string stripped = collapse_whitespace(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw DataError("malformed manifest line " + std::to_string(lineno) + ": missing tab");
    ProjectManifest::Entry entry;
    entry.project_id = collapse_whitespace(line.substr(0, tab));
    entry.root = collapse_whitespace(line.substr(tab + 1));
    if (entry.project_id.empty() || entry.root.empty())
      throw DataError("malformed manifest line " + std::to_string(lineno));
    if (!seen.insert(entry.project_id).second)
      throw DataError("duplicate project id: " + entry.project_id);
    if (!fs::exists(entry.root)) throw DataError("project root does not exist: " + entry.root);
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

EnumerationResult enumerate_sources(const ProjectManifest& manifest) {
  EnumerationResult result;
  for (const auto& entry : manifest.entries) {
    std::vector<std::pair<std::string, fs::path>> found;
    for (const auto& de : fs::recursive_directory_iterator(entry.root)) {
      if (!de.is_regular_file() || de.path().extension() != ".py") continue;
      std::string rel = fs::relative(de.path(), entry.root).generic_string();
      found.emplace_back(std::move(rel), de.path());
    }
    std::sort(found.begin(), found.end());
    for (auto& [rel, abs] : found) {
      std::string text = read_text_file(abs.string());
      if (!is_valid_utf8(text)) {
        ++result.skipped_non_utf8;
        continue;
      }
      result.files.push_back(SourceFile{entry.project_id, std::move(rel), std::move(text)});
    }
  }
  return result;
}

std::vector<RawFunction> extract_corpus(const ProjectManifest& manifest, ExtractionStats& stats,
                                        std::vector<ParseFailure>* failures) {
  ensure_python_runtime();
  EnumerationResult sources = enumerate_sources(manifest);
  stats.skipped_non_utf8 = sources.skipped_non_utf8;
  stats.files = sources.files.size() + sources.skipped_non_utf8;
  std::vector<RawFunction> all;
  for (const auto& src : sources.files) {
    auto parsed = parse_module(src);
    if (std::holds_alternative<ParseFailure>(parsed)) {
      ++stats.parse_failed;
      if (failures) failures->push_back(std::get<ParseFailure>(parsed));
      continue;
    }
    ++stats.parsed;
    auto fns = extract_functions(std::get<Ast>(parsed), &stats);
    all.insert(all.end(), std::make_move_iterator(fns.begin()), std::make_move_iterator(fns.end()));
  }
  return all;
}

namespace {

json opt_to_json(const std::optional<std::string>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<std::string> opt_from_json(const json& v) {
  if (v.is_null()) return std::nullopt;
  return v.get<std::string>();
}

}  // namespace

std::string to_jsonl(const std::vector<RawFunction>& fns) {
  std::string out;
  for (const auto& fn : fns) {
    json j;
    j["project"] = fn.project;
    j["path"] = fn.path;
    j["qualname"] = fn.qualname;
    j["line"] = fn.line;
    j["name"] = fn.name;
    j["docstring"] = opt_to_json(fn.docstring);
    j["fn_comment"] = opt_to_json(fn.fn_comment);
    j["params"] = fn.params;
    j["param_types"] = json::array();
    for (const auto& t : fn.param_types) j["param_types"].push_back(opt_to_json(t));
    j["param_comments"] = json::array();
    for (const auto& c : fn.param_comments) j["param_comments"].push_back(opt_to_json(c));
    j["return_exprs"] = fn.return_exprs;
    j["return_type"] = opt_to_json(fn.return_type);
    j["return_comment"] = opt_to_json(fn.return_comment);
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<RawFunction> from_jsonl(const std::string& jsonl) {
  std::vector<RawFunction> fns;
  std::istringstream in(jsonl);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    RawFunction fn;
    fn.project = j.at("project").get<std::string>();
    fn.path = j.at("path").get<std::string>();
    fn.qualname = j.at("qualname").get<std::string>();
    fn.line = j.at("line").get<int>();
    fn.name = j.at("name").get<std::string>();
    fn.docstring = opt_from_json(j.at("docstring"));
    fn.fn_comment = opt_from_json(j.at("fn_comment"));
    fn.params = j.at("params").get<std::vector<std::string>>();
    for (const auto& t : j.at("param_types")) fn.param_types.push_back(opt_from_json(t));
    for (const auto& c : j.at("param_comments")) fn.param_comments.push_back(opt_from_json(c));
    fn.return_exprs = j.at("return_exprs").get<std::vector<std::vector<std::string>>>();
    fn.return_type = opt_from_json(j.at("return_type"));
    fn.return_comment = opt_from_json(j.at("return_comment"));
    if (fn.params.size() != fn.param_types.size() || fn.params.size() != fn.param_comments.size())
      throw DataError("parallel-list invariant violated in functions.jsonl");
    fns.push_back(std::move(fn));
  }
  return fns;
}

}  // namespace typenet::extract
