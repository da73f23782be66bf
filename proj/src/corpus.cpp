#include "threadloom/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>

#include "json.hpp"
#include "threadloom/error.hpp"

namespace threadloom {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string at_line(std::size_t line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

const json& require(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw data_error(at_line(line, std::string("missing field '") + key + "'"));
  }
  return *it;
}

std::string require_string(const json& obj, const char* key,
                           std::size_t line) {
  const json& v = require(obj, key, line);
  if (!v.is_string()) {
    throw data_error(at_line(line, std::string("field '") + key +
                                       "' must be a string"));
  }
  return v.get<std::string>();
}

int as_index(const json& v, const char* what, std::size_t line) {
  if (!v.is_number_integer()) {
    throw data_error(at_line(line, std::string(what) + " must be an integer"));
  }
  const auto value = v.get<long long>();
  if (value < 1 || value > 1'000'000'000) {
    throw data_error(at_line(line, std::string(what) + " out of range"));
  }
  return static_cast<int>(value);
}

int parse_decimal_key(const std::string& key, std::size_t line) {
  int value = 0;
  const auto* first = key.data();
  const auto* last = key.data() + key.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (key.empty() || ec != std::errc() || ptr != last) {
    throw data_error(
        at_line(line, "gold_parents key '" + key + "' is not a decimal index"));
  }
  return value;
}

Post parse_post(const json& obj, std::size_t line) {
  if (!obj.is_object()) {
    throw data_error(at_line(line, "post must be an object"));
  }
  Post post;
  if (auto it = obj.find("index"); it != obj.end()) {
    post.index = as_index(*it, "post index", line);
  }
  post.author = require_string(obj, "author", line);
  post.text = require_string(obj, "text", line);
  if (auto it = obj.find("quotes"); it != obj.end()) {
    if (!it->is_array()) {
      throw data_error(at_line(line, "quotes must be an array"));
    }
    for (const auto& q : *it) {
      if (!q.is_object()) {
        throw data_error(at_line(line, "quote must be an object"));
      }
      Quote quote;
      if (auto qi = q.find("quoted_post_index");
          qi != q.end() && !qi->is_null()) {
        quote.post_index = as_index(*qi, "quoted_post_index", line);
      }
      quote.text = require_string(q, "quoted_text", line);
      post.quotes.push_back(std::move(quote));
    }
  }
  return post;
}

Thread parse_thread(const json& obj, std::size_t line) {
  if (!obj.is_object()) {
    throw data_error(at_line(line, "record must be a JSON object"));
  }
  Thread thread;
  thread.id = require_string(obj, "thread_id", line);
  if (thread.id.empty()) {
    throw data_error(at_line(line, "thread_id must be nonempty"));
  }
  thread.source = require_string(obj, "source", line);

  const json& posts = require(obj, "posts", line);
  if (!posts.is_array()) {
    throw data_error(at_line(line, "posts must be an array"));
  }
  std::size_t with_index = 0;
  for (const auto& p : posts) {
    thread.posts.push_back(parse_post(p, line));
    if (thread.posts.back().index != 0) ++with_index;
  }
  if (with_index == 0) {
    for (std::size_t i = 0; i < thread.posts.size(); ++i) {
      thread.posts[i].index = static_cast<int>(i + 1);
    }
  } else if (with_index != thread.posts.size()) {
    throw data_error(at_line(line, "either all posts or none carry an index"));
  } else {
    std::stable_sort(thread.posts.begin(), thread.posts.end(),
                     [](const Post& a, const Post& b) { return a.index < b.index; });
  }

  if (auto it = obj.find("gold_parents"); it != obj.end() && !it->is_null()) {
    if (!it->is_object()) {
      throw data_error(at_line(line, "gold_parents must be an object"));
    }
    ParentMap parents;
    for (const auto& [key, value] : it->items()) {
      const int child = parse_decimal_key(key, line);
      if (!value.is_number_integer()) {
        throw data_error(at_line(line, "gold parent of " + key +
                                           " must be an integer"));
      }
      parents[child] = static_cast<int>(value.get<long long>());
    }
    thread.gold_parents = std::move(parents);
  }

  try {
    validate_thread(thread);
  } catch (const Error& e) {
    throw data_error(at_line(line, e.what()));
  }
  return thread;
}

}  // namespace

const Thread* Corpus::find(std::string_view thread_id) const {
  auto it = std::find_if(threads.begin(), threads.end(),
                         [&](const Thread& t) { return t.id == thread_id; });
  return it == threads.end() ? nullptr : &*it;
}

void validate_thread(const Thread& thread) {
  const std::string where = "thread '" + thread.id + "': ";
  const int n = thread.size();
  if (n == 0) throw data_error(where + "thread has no posts");
  for (int i = 0; i < n; ++i) {
    const Post& post = thread.posts[i];
    if (post.index != i + 1) {
      throw data_error(where + "post indices must run 1.." + std::to_string(n) +
                       " without gaps or duplicates");
    }
    for (const Quote& q : post.quotes) {
      if (q.post_index && *q.post_index >= post.index) {
        throw data_error(where + "post " + std::to_string(post.index) +
                         " quotes a post that is not earlier");
      }
    }
  }
  if (!thread.gold_parents) return;

  const ParentMap& parents = *thread.gold_parents;
  for (const auto& [child, parent] : parents) {
    if (child < 2 || child > n) {
      throw data_error(where + "child index out of range: " +
                       std::to_string(child));
    }
    if (parent < 1 || parent > n) {
      throw data_error(where + "parent index out of range: " +
                       std::to_string(child) + "->" + std::to_string(parent));
    }
    if (parent >= child) {
      throw data_error(where + "parent must precede child: " +
                       std::to_string(child) + "->" + std::to_string(parent));
    }
  }
  for (int j = 2; j <= n; ++j) {
    if (!parents.contains(j)) {
      throw data_error(where + "missing gold parent for post " +
                       std::to_string(j));
    }
  }
}

void validate_corpus(const Corpus& corpus) {
  std::map<std::string_view, int> seen;
  for (const Thread& t : corpus.threads) {
    validate_thread(t);
    if (++seen[t.id] > 1) {
      throw data_error("duplicate thread_id '" + t.id + "'");
    }
  }
}

Corpus parse_corpus(std::istream& in, std::string name) {
  Corpus corpus;
  corpus.name = std::move(name);
  std::map<std::string, std::size_t> first_seen;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.find_first_not_of(" \t") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(text);
    } catch (const json::parse_error& e) {
      throw data_error(at_line(line, std::string("malformed record: ") + e.what()));
    }
    Thread thread = parse_thread(obj, line);
    auto [it, inserted] = first_seen.emplace(thread.id, line);
    if (!inserted) {
      throw data_error(at_line(line, "duplicate thread_id '" + thread.id +
                                         "' (first seen on line " +
                                         std::to_string(it->second) + ")"));
    }
    corpus.threads.push_back(std::move(thread));
  }
  return corpus;
}

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open corpus file '" + path + "'");
  std::string name = path;
  if (auto slash = name.find_last_of('/'); slash != std::string::npos) {
    name.erase(0, slash + 1);
  }
  if (auto dot = name.find('.'); dot != std::string::npos && dot > 0) {
    name.erase(dot);
  }
  return parse_corpus(in, name);
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const Thread& t : corpus.threads) {
    ordered_json obj;
    obj["thread_id"] = t.id;
    obj["source"] = t.source;
    ordered_json posts = ordered_json::array();
    for (const Post& p : t.posts) {
      ordered_json post;
      post["index"] = p.index;
      post["author"] = p.author;
      post["text"] = p.text;
      if (!p.quotes.empty()) {
        ordered_json quotes = ordered_json::array();
        for (const Quote& q : p.quotes) {
          ordered_json quote;
          if (q.post_index) quote["quoted_post_index"] = *q.post_index;
          quote["quoted_text"] = q.text;
          quotes.push_back(std::move(quote));
        }
        post["quotes"] = std::move(quotes);
      }
      posts.push_back(std::move(post));
    }
    obj["posts"] = std::move(posts);
    if (t.gold_parents) {
      ordered_json parents = ordered_json::object();
      for (const auto& [child, parent] : *t.gold_parents) {
        parents[std::to_string(child)] = parent;
      }
      obj["gold_parents"] = std::move(parents);
    }
    out << obj.dump() << '\n';
  }
}

void save_corpus(const std::string& path, const Corpus& corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write corpus file '" + path + "'");
  write_corpus(out, corpus);
}

std::string strip_nested_quotes(std::string_view text,
                                const QuoteMarkers& markers,
                                const WarningSink& warn) {
  if (markers.open.empty() || markers.close.empty()) {
    throw usage_error("quote markers must be nonempty");
  }
  auto report = [&](std::string_view msg) {
    if (warn) {
      warn(msg);
    } else {
      std::clog << "warning: " << msg << '\n';
    }
  };

  std::string out;
  out.reserve(text.size());
  int depth = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    const std::string_view rest = text.substr(i);
    const bool at_open = rest.starts_with(markers.open);
    const bool at_close = rest.starts_with(markers.close);
    // Prefer the longer marker when one is a prefix of the other.
    if (at_close && (!at_open || markers.close.size() >= markers.open.size())) {
      if (depth == 0) {
        report("unbalanced quote markers: close without open; text left unchanged");
        return std::string(text);
      }
      if (depth == 1) out += markers.close;
      --depth;
      i += markers.close.size();
    } else if (at_open) {
      if (depth == 0) out += markers.open;
      ++depth;
      i += markers.open.size();
    } else {
      if (depth <= 1) out += text[i];
      ++i;
    }
  }
  if (depth != 0) {
    report("unbalanced quote markers: unclosed quote; text left unchanged");
    return std::string(text);
  }
  return out;
}

Corpus strip_corpus_quotes(const Corpus& corpus, const QuoteMarkers& markers,
                           const WarningSink& warn) {
  Corpus out = corpus;
  for (Thread& t : out.threads) {
    for (Post& p : t.posts) {
      p.text = strip_nested_quotes(p.text, markers, warn);
      // A quoted span already sits one level deep, so any block inside it is
      // a quote of a quote.
      for (Quote& q : p.quotes) {
        const std::string wrapped =
            strip_nested_quotes(markers.open + q.text + markers.close, markers, warn);
        q.text = wrapped.substr(markers.open.size(),
                                wrapped.size() - markers.open.size() -
                                    markers.close.size());
      }
    }
  }
  return out;
}

}  // namespace threadloom
