#include "typenet/nlp.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>

#include "typenet/common.hpp"

#ifndef TYPENET_DATA_DIR
#define TYPENET_DATA_DIR "data"
#endif

namespace typenet::nlp {

namespace {

bool is_alpha(unsigned char c) { return std::isalpha(c) != 0; }
bool is_upper(unsigned char c) { return std::isupper(c) != 0; }
bool is_lower(unsigned char c) { return std::islower(c) != 0; }
bool is_ws(unsigned char c) { return std::isspace(c) != 0; }

std::vector<std::string> split_on_spaces(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream ss(text);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

}  // namespace

std::string default_data_dir() {
  if (const char* env = std::getenv("TYPENET_DATA")) return env;
  return TYPENET_DATA_DIR;
}

Lexicon Lexicon::load(const std::string& data_dir) {
  Lexicon lex;
  std::string stop_text = read_text_file(data_dir + "/stopwords.txt");
  lex.stopword_hash_ = fnv1a64(stop_text);
  std::istringstream stop_in(stop_text);
  std::string line;
  while (std::getline(stop_in, line)) {
    line = collapse_whitespace(line);
    if (line.empty() || line[0] == '#') continue;
    lex.stopwords_.insert(line);
  }

  std::string lemma_text = read_text_file(data_dir + "/lemmas.tsv");
  lex.lemma_hash_ = fnv1a64(lemma_text);
  std::istringstream lemma_in(lemma_text);
  while (std::getline(lemma_in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) continue;
    std::string inflected = collapse_whitespace(line.substr(0, tab));
    std::string lemma = collapse_whitespace(line.substr(tab + 1));
    if (!inflected.empty() && !lemma.empty()) lex.lemmas_.emplace(inflected, lemma);
  }
  return lex;
}

const Lexicon& Lexicon::default_instance() {
  static Lexicon lex = Lexicon::load(default_data_dir());
  return lex;
}

std::string Lexicon::lemmatize(const std::string& token) const {
  auto it = lemmas_.find(token);
  return it == lemmas_.end() ? token : it->second;
}

std::string normalize_text(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  const size_t n = text.size();
  for (size_t i = 0; i < n; ++i) {
    unsigned char c = text[i];
    if (c == '.') {
      // Sentence terminator: whitespace-then-uppercase follows, or end of
      // text. Terminators are deleted; every other full stop becomes a
      // space ("object.property" -> "object property").
      size_t j = i + 1;
      while (j < n && is_ws(text[j])) ++j;
      bool terminator = (j == n) || (j > i + 1 && is_upper(text[j]));
      if (!terminator) out.push_back(' ');
    } else if (is_alpha(c)) {
      out.push_back(static_cast<char>(std::tolower(c)));
    } else {
      out.push_back(' ');
    }
  }
  return collapse_whitespace(out);
}

std::vector<std::string> split_identifier(const std::string& name) {
  std::vector<std::string> words;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      words.push_back(cur);
      cur.clear();
    }
  };
  const size_t n = name.size();
  for (size_t i = 0; i < n; ++i) {
    unsigned char c = name[i];
    if (!is_alpha(c)) {
      flush();  // underscores, digits and punctuation all separate words
      continue;
    }
    if (!cur.empty() && is_upper(c)) {
      unsigned char prev = name[i - 1];
      bool lower_to_upper = is_lower(prev);
      // "HTTPServer": split before the last upper of an uppercase run that
      // is followed by a lowercase letter.
      bool acronym_end = is_upper(prev) && i + 1 < n && is_lower(static_cast<unsigned char>(name[i + 1]));
      if (lower_to_upper || acronym_end) flush();
    }
    cur.push_back(static_cast<char>(std::tolower(c)));
  }
  flush();
  return words;
}

TokenSequence preprocess_comment(const std::string& text, const Lexicon& lex) {
  TokenSequence seq;
  seq.kind = TokenKind::Comment;
  for (const std::string& tok : split_on_spaces(normalize_text(text))) {
    std::string lemma = lex.lemmatize(tok);
    if (lex.is_stopword(lemma)) continue;
    seq.tokens.push_back(std::move(lemma));
  }
  return seq;
}

TokenSequence preprocess_identifier(const std::string& name, const Lexicon& lex) {
  TokenSequence seq;
  seq.kind = TokenKind::Identifier;
  for (const std::string& word : split_identifier(name)) {
    seq.tokens.push_back(lex.lemmatize(word));
  }
  return seq;
}

}  // namespace typenet::nlp
