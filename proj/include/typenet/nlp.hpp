#pragma once

#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace typenet::nlp {

enum class TokenKind { Comment, Identifier };

struct TokenSequence {
  std::vector<std::string> tokens;  // every token matches [a-z]+
  TokenKind kind;
};

// Stopword list + lemma dictionary, loaded from plain-text data files.
// Both file hashes are exposed so runs can record exactly which snapshot
// they used.
class Lexicon {
 public:
  static Lexicon load(const std::string& data_dir);
  static const Lexicon& default_instance();

  bool is_stopword(const std::string& word) const { return stopwords_.count(word) > 0; }
  // Dictionary lemma when known, the token unchanged otherwise.
  std::string lemmatize(const std::string& token) const;

  const std::unordered_set<std::string>& stopwords() const { return stopwords_; }
  const std::unordered_map<std::string, std::string>& lemmas() const { return lemmas_; }

  size_t stopword_count() const { return stopwords_.size(); }
  size_t lemma_count() const { return lemmas_.size(); }
  uint64_t stopword_hash() const { return stopword_hash_; }
  uint64_t lemma_hash() const { return lemma_hash_; }

 private:
  std::unordered_set<std::string> stopwords_;
  std::unordered_map<std::string, std::string> lemmas_;
  uint64_t stopword_hash_ = 0;
  uint64_t lemma_hash_ = 0;
};

// Resolves the data directory: $TYPENET_DATA if set, else the compiled-in
// source-tree default.
std::string default_data_dir();

// Line breaks removed, sentence-final full stops deleted, every other
// non-alphabetic character replaced by a space, lowercased, whitespace
// collapsed. A full stop terminates a sentence iff it is followed by
// whitespace then an uppercase letter, or ends the text.
std::string normalize_text(const std::string& text);

// snake_case and camelCase split into lowercase words; digits dropped.
std::vector<std::string> split_identifier(const std::string& name);

// normalize -> tokenize -> lemmatize -> drop stopwords
TokenSequence preprocess_comment(const std::string& text, const Lexicon& lex);

// split -> lemmatize; stopwords are kept for identifiers
TokenSequence preprocess_identifier(const std::string& name, const Lexicon& lex);

}  // namespace typenet::nlp
