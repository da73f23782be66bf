#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace threadloom {

struct Quote {
  std::optional<int> post_index;  // the quoted post, when known
  std::string text;

  bool operator==(const Quote&) const = default;
};

// A single forum post. Indices are 1-based and follow posting order; index 1
// is the thread creator's post.
struct Post {
  int index = 0;
  std::string author;
  std::string text;
  std::vector<Quote> quotes;

  bool operator==(const Post&) const = default;
};

// child index -> parent index, one entry for every post except the root.
using ParentMap = std::map<int, int>;

struct Thread {
  std::string id;
  std::string source;
  std::vector<Post> posts;
  std::optional<ParentMap> gold_parents;

  int size() const { return static_cast<int>(posts.size()); }
  const Post& post(int index) const { return posts.at(index - 1); }
  bool has_gold() const { return gold_parents.has_value(); }

  bool operator==(const Thread&) const = default;
};

struct Corpus {
  std::string name;
  std::vector<Thread> threads;

  const Thread* find(std::string_view thread_id) const;

  bool operator==(const Corpus&) const = default;
};

// Throws a data Error describing the first violated invariant.
void validate_thread(const Thread& thread);
void validate_corpus(const Corpus& corpus);

// Reads the line-delimited corpus format: one JSON object per line with
// thread_id, source, posts[{index?, author, text, quotes?}] and optional
// gold_parents {"child": parent}. Blank lines are skipped. When no post of a
// thread carries an index the posts are numbered 1..n in file order.
// Errors name the offending line number.
Corpus parse_corpus(std::istream& in, std::string name = {});
Corpus load_corpus(const std::string& path);

// Inverse of parse_corpus; output is deterministic.
void write_corpus(std::ostream& out, const Corpus& corpus);
void save_corpus(const std::string& path, const Corpus& corpus);

struct QuoteMarkers {
  std::string open = "[quote]";
  std::string close = "[/quote]";
};

using WarningSink = std::function<void(std::string_view)>;

// Removes quote blocks that sit inside another quote block, delimiters
// included. Depth-1 blocks and text outside quotes are kept byte for byte.
// Unbalanced delimiters leave the text untouched and emit a warning (to
// std::clog when no sink is given).
std::string strip_nested_quotes(std::string_view text,
                                const QuoteMarkers& markers = {},
                                const WarningSink& warn = {});

// Applies strip_nested_quotes to every post text. Quoted spans are one level
// deep already, so every quote block inside them is removed.
Corpus strip_corpus_quotes(const Corpus& corpus,
                           const QuoteMarkers& markers = {},
                           const WarningSink& warn = {});

}  // namespace threadloom
