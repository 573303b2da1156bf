#include <algorithm>
#include <cctype>
#include <sstream>

#include "typenet/common.hpp"
#include "typenet/extract.hpp"

namespace typenet::extract {

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in(text);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::string strip(const std::string& s) { return collapse_whitespace(s); }

size_t indent_of(const std::string& line) {
  size_t i = 0;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  return i;
}

bool is_blank(const std::string& line) { return strip(line).empty(); }

bool is_dash_underline(const std::string& line) {
  std::string t = strip(line);
  return t.size() >= 3 && t.find_first_not_of('-') == std::string::npos;
}

const char* kRestFields[] = {"param", "parameter", "arg",    "argument", "key",  "keyword",
                             "type",  "return",    "returns", "rtype",   "raise", "raises",
                             "yield", "yields",    "var",     "ivar",    "vartype"};

// `:param name: text` style field line; returns the field words between the
// two colons, or empty when the line is not a field.
std::vector<std::string> rest_field_words(const std::string& line) {
  std::string t = strip(line);
  if (t.empty() || t[0] != ':') return {};
  auto close = t.find(':', 1);
  if (close == std::string::npos) return {};
  std::istringstream ss(t.substr(1, close - 1));
  std::vector<std::string> words;
  std::string w;
  while (ss >> w) words.push_back(w);
  if (words.empty()) return {};
  for (const char* f : kRestFields)
    if (words[0] == f) return words;
  return {};
}

bool is_google_header(const std::string& line, std::string& section) {
  std::string t = strip(line);
  static const std::pair<const char*, const char*> kHeaders[] = {
      {"Args:", "args"},          {"Arguments:", "args"},        {"Keyword Args:", "args"},
      {"Keyword Arguments:", "args"}, {"Returns:", "returns"},   {"Yields:", "yields"},
      {"Raises:", "raises"},      {"Attributes:", "attributes"}, {"Example:", "other"},
      {"Examples:", "other"},     {"Note:", "other"},            {"Notes:", "other"}};
  for (const auto& [h, s] : kHeaders) {
    if (t == h) {
      section = s;
      return true;
    }
  }
  return false;
}

bool is_numpy_header(const std::vector<std::string>& lines, size_t i, std::string& section) {
  if (i + 1 >= lines.size() || !is_dash_underline(lines[i + 1])) return false;
  std::string t = strip(lines[i]);
  static const std::pair<const char*, const char*> kHeaders[] = {
      {"Parameters", "args"},  {"Other Parameters", "args"}, {"Returns", "returns"},
      {"Yields", "yields"},    {"Raises", "raises"},         {"See Also", "other"},
      {"Notes", "other"},      {"Examples", "other"},        {"Attributes", "attributes"},
      {"References", "other"}, {"Warns", "other"}};
  for (const auto& [h, s] : kHeaders) {
    if (t == h) {
      section = s;
      return true;
    }
  }
  return false;
}

std::string join_stripped(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    std::string t = strip(p);
    if (t.empty()) continue;
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

DocstringInfo parse_rest(const std::vector<std::string>& lines) {
  DocstringInfo info;
  info.style = DocstringInfo::Style::ReST;
  std::vector<std::string> description;
  std::string* current = nullptr;  // continuation target
  std::string discard;
  bool seen_field = false;
  for (const auto& line : lines) {
    auto words = rest_field_words(line);
    if (words.empty()) {
      if (current && !is_blank(line) && indent_of(line) > 0) {
        *current += " " + strip(line);
        continue;
      }
      current = nullptr;
      if (!seen_field) description.push_back(line);
      continue;
    }
    seen_field = true;
    std::string t = strip(line);
    std::string body = strip(t.substr(t.find(':', 1) + 1));
    const std::string& field = words[0];
    if (field == "param" || field == "parameter" || field == "arg" || field == "argument" ||
        field == "key" || field == "keyword") {
      // `:param name:` or `:param type name:` -- the name is the last word
      info.param_comments.emplace_back(words.back(), body);
      current = &info.param_comments.back().second;
    } else if (field == "return" || field == "returns") {
      info.return_comment = body;
      current = &*info.return_comment;
    } else {
      current = &discard;
      discard.clear();
    }
  }
  info.description = join_stripped(description);
  return info;
}

DocstringInfo parse_google(const std::vector<std::string>& lines) {
  DocstringInfo info;
  info.style = DocstringInfo::Style::Google;
  std::vector<std::string> description;
  std::string section;
  bool in_section = false;
  size_t entry_indent = std::string::npos;
  std::string* current = nullptr;
  std::vector<std::string> return_parts;

  for (const auto& line : lines) {
    std::string next_section;
    if (is_google_header(line, next_section)) {
      section = next_section;
      in_section = true;
      entry_indent = std::string::npos;
      current = nullptr;
      continue;
    }
    if (!in_section) {
      description.push_back(line);
      continue;
    }
    if (is_blank(line)) continue;
    if (section == "args") {
      size_t ind = indent_of(line);
      if (entry_indent == std::string::npos) entry_indent = ind;
      std::string t = strip(line);
      auto colon = t.find(':');
      if (ind <= entry_indent && colon != std::string::npos) {
        std::string head = strip(t.substr(0, colon));
        // drop a parenthesized type: `name (int)`
        auto paren = head.find('(');
        if (paren != std::string::npos) head = strip(head.substr(0, paren));
        while (!head.empty() && head[0] == '*') head.erase(head.begin());
        bool ident = !head.empty() && std::all_of(head.begin(), head.end(), [](unsigned char c) {
          return std::isalnum(c) || c == '_';
        });
        if (ident) {
          info.param_comments.emplace_back(head, strip(t.substr(colon + 1)));
          current = &info.param_comments.back().second;
          continue;
        }
      }
      if (current) *current += " " + t;
    } else if (section == "returns") {
      return_parts.push_back(line);
    }
  }
  if (!return_parts.empty()) info.return_comment = join_stripped(return_parts);
  info.description = join_stripped(description);
  return info;
}

DocstringInfo parse_numpy(const std::vector<std::string>& lines) {
  DocstringInfo info;
  info.style = DocstringInfo::Style::Numpy;
  std::vector<std::string> description;
  std::string section;
  bool in_section = false;
  size_t entry_indent = std::string::npos;
  std::string* current = nullptr;
  std::vector<std::string> return_desc;

  for (size_t i = 0; i < lines.size(); ++i) {
    std::string next_section;
    if (is_numpy_header(lines, i, next_section)) {
      section = next_section;
      in_section = true;
      entry_indent = std::string::npos;
      current = nullptr;
      ++i;  // skip the dashes
      continue;
    }
    const std::string& line = lines[i];
    if (!in_section) {
      description.push_back(line);
      continue;
    }
    if (is_blank(line)) continue;
    size_t ind = indent_of(line);
    if (section == "args") {
      if (entry_indent == std::string::npos) entry_indent = ind;
      if (ind <= entry_indent) {
        // `name : type` or just `name`
        std::string t = strip(line);
        std::string head = t;
        auto colon = t.find(':');
        if (colon != std::string::npos) head = strip(t.substr(0, colon));
        while (!head.empty() && head[0] == '*') head.erase(head.begin());
        bool ident = !head.empty() && std::all_of(head.begin(), head.end(), [](unsigned char c) {
          return std::isalnum(c) || c == '_';
        });
        if (ident) {
          info.param_comments.emplace_back(head, "");
          current = &info.param_comments.back().second;
          continue;
        }
      }
      if (current) {
        if (!current->empty()) *current += " ";
        *current += strip(line);
      }
    } else if (section == "returns") {
      if (entry_indent == std::string::npos) {
        entry_indent = ind;
        continue;  // the type line
      }
      if (ind > entry_indent) return_desc.push_back(line);
    }
  }
  if (!return_desc.empty()) info.return_comment = join_stripped(return_desc);
  info.description = join_stripped(description);
  return info;
}

}  // namespace

DocstringInfo parse_docstring(const std::string& docstring) {
  auto lines = split_lines(docstring);

  for (const auto& line : lines) {
    if (!rest_field_words(line).empty()) return parse_rest(lines);
  }
  std::string section;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (is_numpy_header(lines, i, section) && (section == "args" || section == "returns"))
      return parse_numpy(lines);
  }
  for (const auto& line : lines) {
    if (is_google_header(line, section) && (section == "args" || section == "returns"))
      return parse_google(lines);
  }

  DocstringInfo info;
  info.style = DocstringInfo::Style::Unstructured;
  info.description = join_stripped(lines);
  return info;
}

}  // namespace typenet::extract
