#include "threadloom/text.hpp"

#include <algorithm>

namespace threadloom {

namespace {

bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c >= 0x80;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_word_byte(c)) {
      current += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch;
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

const std::vector<std::string>& stopwords() {
  static const std::vector<std::string> words = {
      "a",    "about", "an",   "and",   "are",  "as",   "at",   "be",
      "but",  "by",    "can",  "do",    "for",  "from", "has",  "have",
      "i",    "if",    "in",   "is",    "it",   "just", "me",   "my",
      "no",   "not",   "of",   "on",    "or",   "so",   "that", "the",
      "then", "there", "this", "to",    "was",  "we",   "what", "will",
      "with", "you",   "your", "quote",
  };
  return words;
}

bool is_stopword(std::string_view token) {
  static const std::set<std::string, std::less<>> set(stopwords().begin(),
                                                      stopwords().end());
  return set.contains(token);
}

std::set<std::string> content_words(std::string_view text) {
  std::set<std::string> words;
  for (auto& t : tokenize(text)) {
    if (!is_stopword(t)) words.insert(std::move(t));
  }
  return words;
}

}  // namespace threadloom
