#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "threadloom/corpus.hpp"

namespace threadloom {

enum class PairLabel { False, True };

inline PairLabel to_label(bool positive) {
  return positive ? PairLabel::True : PairLabel::False;
}

// One classification unit: two posts of the same thread, oriented so the
// earlier post is the candidate parent of the later one.
struct PairExample {
  std::string thread_id;
  int earlier_index = 0;
  int later_index = 0;
  std::string earlier_text;
  std::string later_text;
  std::optional<PairLabel> label;

  // "<thread_id>:<earlier>:<later>"
  std::string pair_id() const;

  bool operator==(const PairExample&) const = default;
};

// All n(n-1)/2 (earlier, later) combinations in (earlier, later) order.
// Labels are set only when the thread has gold parents; a pair is True
// exactly when the later post's gold parent is the earlier post.
std::vector<PairExample> generate_pairs(const Thread& thread);

// Per-thread pair lists concatenated in thread order.
std::vector<PairExample> generate_corpus_pairs(const Corpus& corpus);

// Keeps every positive and unlabeled pair and a seeded keep_ratio share of
// the negatives. Order is preserved.
std::vector<PairExample> subsample_negatives(std::vector<PairExample> pairs,
                                             double keep_ratio,
                                             std::uint64_t seed);

struct SplitSpec {
  double train_ratio = 0.6;
  double dev_ratio = 0.1;
  double test_ratio = 0.3;
  std::uint64_t seed = 0;

  void validate() const;
};

struct PairSplit {
  std::vector<PairExample> train;
  std::vector<PairExample> dev;
  std::vector<PairExample> test;
};

// Seeded shuffle, then |train| = floor(train_ratio * N),
// |dev| = floor(dev_ratio * N), test takes the rest. Every pair must be
// labeled.
PairSplit split_pairs(const std::vector<PairExample>& pairs,
                      const SplitSpec& spec);

// Line-delimited pair records {thread_id, earlier_index, later_index,
// earlier_text, later_text, label?}.
void write_pairs(std::ostream& out, const std::vector<PairExample>& pairs);
std::vector<PairExample> read_pairs(std::istream& in);
std::vector<PairExample> load_pairs(const std::string& path);
void save_pairs(const std::string& path, const std::vector<PairExample>& pairs);

}  // namespace threadloom
