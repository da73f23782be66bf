#include "threadloom/synth.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "threadloom/error.hpp"
#include "threadloom/random.hpp"
#include "threadloom/text.hpp"

namespace threadloom {

namespace {

constexpr const char* kConsonants = "bdfghjklmnprstvz";
constexpr const char* kVowels = "aeiou";
constexpr std::uint64_t kSyllables = 16 * 5;
constexpr std::uint64_t kVocabSize = kSyllables * kSyllables * kSyllables;
constexpr int kUserPool = 50;

std::string pseudo_word(std::uint64_t id) {
  std::string word;
  for (int s = 0; s < 3; ++s) {
    const auto syl = id % kSyllables;
    id /= kSyllables;
    word += kConsonants[syl / 5];
    word += kVowels[syl % 5];
  }
  return word;
}

std::string user_name(int id) {
  std::string digits = std::to_string(id);
  if (digits.size() < 2) digits.insert(0, "0");
  return "user" + digits;
}

std::string thread_name(int id) {
  std::string digits = std::to_string(id);
  while (digits.size() < 4) digits.insert(0, "0");
  return "t" + digits;
}

int draw_parent(TreeShape shape, int child, Rng& rng) {
  switch (shape) {
    case TreeShape::chain:
      return child - 1;
    case TreeShape::star:
      return 1;
    case TreeShape::random:
      break;
  }
  return 1 + static_cast<int>(uniform_below(rng, child - 1));
}

std::vector<std::string> draw_content(const std::vector<std::string>* parent,
                                      int inherited, int total, Rng& rng) {
  std::vector<std::string> words;
  std::set<std::string> used;
  if (parent != nullptr && inherited > 0) {
    std::vector<std::string> pool = *parent;
    shuffle(std::span(pool), rng);
    for (int i = 0; i < inherited && i < static_cast<int>(pool.size()); ++i) {
      used.insert(pool[i]);
      words.push_back(pool[i]);
    }
  }
  while (static_cast<int>(words.size()) < total) {
    std::string w = pseudo_word(uniform_below(rng, kVocabSize));
    if (used.insert(w).second) words.push_back(std::move(w));
  }
  return words;
}

std::string render_text(std::vector<std::string> words, Rng& rng) {
  const auto& stop = stopwords();
  const int filler = 2 + static_cast<int>(uniform_below(rng, 4));
  for (int i = 0; i < filler; ++i) {
    words.push_back(stop[uniform_below(rng, stop.size())]);
  }
  shuffle(std::span(words), rng);
  std::string text;
  for (const auto& w : words) {
    if (!text.empty()) text += ' ';
    text += w;
  }
  return text;
}

}  // namespace

Corpus synth_corpus(const SynthOptions& options) {
  if (options.n_threads < 0) throw usage_error("thread count must be >= 0");
  if (options.min_posts < 1 || options.max_posts < options.min_posts) {
    throw usage_error("posts-per-thread range must be nonempty and >= 1");
  }
  if (!(options.vocab_coupling >= 0.0 && options.vocab_coupling <= 1.0)) {
    throw usage_error("vocab_coupling must lie in [0, 1]");
  }
  if (options.content_words_per_post < 1) {
    throw usage_error("content_words_per_post must be >= 1");
  }

  Rng rng(options.seed);
  const int total = options.content_words_per_post;
  const int inherited =
      static_cast<int>(std::lround(options.vocab_coupling * total));
  const auto span = static_cast<std::uint64_t>(options.max_posts -
                                               options.min_posts + 1);

  Corpus corpus;
  corpus.name = "synth";
  for (int t = 1; t <= options.n_threads; ++t) {
    Thread thread;
    thread.id = thread_name(t);
    thread.source = "forum" + std::to_string(1 + uniform_below(rng, 3));
    const int n = options.min_posts + static_cast<int>(uniform_below(rng, span));

    const int participants =
        std::min(kUserPool, 2 + static_cast<int>(uniform_below(rng, 5)));
    std::vector<int> pool(kUserPool);
    for (int u = 0; u < kUserPool; ++u) pool[u] = u;
    shuffle(std::span(pool), rng);
    pool.resize(participants);

    ParentMap parents;
    std::vector<std::vector<std::string>> content(n + 1);
    for (int j = 1; j <= n; ++j) {
      const int parent = j == 1 ? 0 : draw_parent(options.shape, j, rng);
      if (parent != 0) parents[j] = parent;
      content[j] = draw_content(parent != 0 ? &content[parent] : nullptr,
                                inherited, total, rng);
      Post post;
      post.index = j;
      post.author = user_name(j == 1 ? pool[0]
                                     : pool[uniform_below(rng, pool.size())]);
      post.text = render_text(content[j], rng);
      thread.posts.push_back(std::move(post));
    }
    thread.gold_parents = std::move(parents);
    corpus.threads.push_back(std::move(thread));
  }
  return corpus;
}

}  // namespace threadloom
