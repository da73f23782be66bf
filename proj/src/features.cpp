#include "threadloom/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "threadloom/error.hpp"
#include "threadloom/text.hpp"

namespace threadloom {

namespace {

constexpr std::array<std::string_view, kFeatureCount> kNames = {
    "cosine_tfidf",    "jaccard_content", "quote_overlap", "positional_gap",
    "is_adjacent",     "earlier_is_root", "same_author",   "bias",
};

std::size_t intersection_size(const std::set<std::string>& a,
                              const std::set<std::string>& b) {
  std::size_t count = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++count;
      ++ia;
      ++ib;
    }
  }
  return count;
}

}  // namespace

std::string_view feature_name(Feature f) {
  return kNames[static_cast<std::size_t>(f)];
}

std::string_view feature_name(std::size_t index) { return kNames.at(index); }

ThreadFeatures::ThreadFeatures(const Thread& thread) : thread_(&thread) {
  const auto n = static_cast<std::size_t>(thread.size());
  std::map<std::string, int> term_ids;
  std::vector<std::map<int, int>> counts(n);
  tokens_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Post& post = thread.posts[i];
    for (auto& tok : tokenize(post.text)) {
      const int id = term_ids.emplace(tok, static_cast<int>(term_ids.size()))
                         .first->second;
      ++counts[i][id];
      tokens_[i].insert(std::move(tok));
    }
  }

  std::vector<int> df(term_ids.size(), 0);
  for (const auto& c : counts) {
    for (const auto& [id, _] : c) ++df[id];
  }

  tfidf_.resize(n);
  content_.resize(n);
  quoted_tokens_.resize(n);
  const double docs = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    SparseVector& v = tfidf_[i];
    double norm2 = 0.0;
    for (const auto& [id, tf] : counts[i]) {
      const double idf = std::log((1.0 + docs) / (1.0 + df[id])) + 1.0;
      const double w = tf * idf;
      v.emplace_back(id, w);
      norm2 += w * w;
    }
    if (norm2 > 0.0) {
      const double inv = 1.0 / std::sqrt(norm2);
      for (auto& [_, w] : v) w *= inv;
    }
    for (const auto& tok : tokens_[i]) {
      if (!is_stopword(tok)) content_[i].insert(tok);
    }
    for (const Quote& q : thread.posts[i].quotes) {
      for (auto& tok : tokenize(q.text)) quoted_tokens_[i].insert(std::move(tok));
    }
  }
}

FeatureVector ThreadFeatures::extract(int earlier, int later) const {
  const int n = thread_->size();
  if (earlier < 1 || earlier >= later || later > n) {
    throw data_error("pair (" + std::to_string(earlier) + ", " +
                     std::to_string(later) + ") is not an ordered pair of thread '" +
                     thread_->id + "'");
  }
  const auto a = static_cast<std::size_t>(earlier - 1);
  const auto b = static_cast<std::size_t>(later - 1);
  FeatureVector f;

  double dot = 0.0;
  auto ia = tfidf_[a].begin();
  auto ib = tfidf_[b].begin();
  while (ia != tfidf_[a].end() && ib != tfidf_[b].end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      dot += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  f[Feature::cosine_tfidf] = std::clamp(dot, 0.0, 1.0);

  const std::size_t common = intersection_size(content_[a], content_[b]);
  const std::size_t uni = content_[a].size() + content_[b].size() - common;
  f[Feature::jaccard_content] =
      uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);

  const auto& quoted = quoted_tokens_[b];
  f[Feature::quote_overlap] =
      quoted.empty() ? 0.0
                     : static_cast<double>(intersection_size(quoted, tokens_[a])) /
                           static_cast<double>(quoted.size());

  f[Feature::positional_gap] = 1.0 / static_cast<double>(later - earlier);
  f[Feature::is_adjacent] = later == earlier + 1 ? 1.0 : 0.0;
  f[Feature::earlier_is_root] = earlier == 1 ? 1.0 : 0.0;
  f[Feature::same_author] =
      thread_->post(earlier).author == thread_->post(later).author ? 1.0 : 0.0;
  f[Feature::bias] = 1.0;
  return f;
}

FeatureVector extract_features(const PairExample& pair, const Thread& thread) {
  if (pair.thread_id != thread.id) {
    throw data_error("pair " + pair.pair_id() + " does not belong to thread '" +
                     thread.id + "'");
  }
  return ThreadFeatures(thread).extract(pair.earlier_index, pair.later_index);
}

}  // namespace threadloom
