#pragma once

#include <cstdint>

#include "threadloom/corpus.hpp"

namespace threadloom {

enum class TreeShape {
  random,  // parent of post j drawn uniformly from 1..j-1
  chain,   // parent of post j is j-1
  star,    // every post replies to the creator's post
};

struct SynthOptions {
  std::uint64_t seed = 7;
  int n_threads = 20;
  int min_posts = 10;
  int max_posts = 20;
  // Fraction of a child's content words sampled from its parent's.
  double vocab_coupling = 0.6;
  TreeShape shape = TreeShape::random;
  int content_words_per_post = 10;
};

// Synthetic corpus with gold reply trees. A child post draws
// round(vocab_coupling * content_words_per_post) of its content words from its
// parent and the rest fresh from a ~512k-word pseudo-vocabulary, so posts in
// different lineages share almost no content words. Stopword filler is mixed into every post.
// Output depends only on the options.
Corpus synth_corpus(const SynthOptions& options);

}  // namespace threadloom
