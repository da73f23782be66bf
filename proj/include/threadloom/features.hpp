#pragma once

#include <array>
#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "threadloom/corpus.hpp"
#include "threadloom/pairing.hpp"

namespace threadloom {

enum class Feature : std::size_t {
  cosine_tfidf,     // thread-local tf-idf cosine, [0,1]
  jaccard_content,  // Jaccard over non-stopword token sets, [0,1]
  quote_overlap,    // share of the later post's quoted tokens found in the earlier post
  positional_gap,   // 1 / (later - earlier)
  is_adjacent,
  earlier_is_root,
  same_author,
  bias,
};

inline constexpr std::size_t kFeatureCount = 8;
inline constexpr std::size_t kBiasIndex = static_cast<std::size_t>(Feature::bias);

std::string_view feature_name(Feature f);
std::string_view feature_name(std::size_t index);

struct FeatureVector {
  std::array<double, kFeatureCount> values{};

  double operator[](Feature f) const { return values[static_cast<std::size_t>(f)]; }
  double& operator[](Feature f) { return values[static_cast<std::size_t>(f)]; }

  bool operator==(const FeatureVector&) const = default;
};

// Per-thread statistics shared by every pair of the thread: tf-idf vectors
// (document = post, collection = thread), content-word sets and quote tokens.
// idf is smoothed, ln((1 + N) / (1 + df)) + 1, so no term weight vanishes.
class ThreadFeatures {
 public:
  explicit ThreadFeatures(const Thread& thread);

  // Indices must satisfy 1 <= earlier < later <= thread size.
  FeatureVector extract(int earlier, int later) const;

  const Thread& thread() const { return *thread_; }

 private:
  using SparseVector = std::vector<std::pair<int, double>>;  // sorted by term id

  const Thread* thread_;
  std::vector<SparseVector> tfidf_;
  std::vector<std::set<std::string>> content_;
  std::vector<std::set<std::string>> tokens_;
  std::vector<std::set<std::string>> quoted_tokens_;
};

// Convenience wrapper building the thread statistics for one pair.
FeatureVector extract_features(const PairExample& pair, const Thread& thread);

}  // namespace threadloom
