#include "threadloom/pairing.hpp"

#include <cmath>
#include <fstream>
#include <span>

#include "json.hpp"
#include "threadloom/error.hpp"
#include "threadloom/kernels.hpp"
#include "threadloom/random.hpp"

namespace threadloom {

using nlohmann::json;
using nlohmann::ordered_json;

std::string PairExample::pair_id() const {
  return thread_id + ":" + std::to_string(earlier_index) + ":" +
         std::to_string(later_index);
}

std::vector<PairExample> generate_pairs(const Thread& thread) {
  const int n = thread.size();
  std::vector<PairExample> pairs;
  pairs.reserve(static_cast<std::size_t>(n) * (n > 0 ? n - 1 : 0) / 2);
  for (int earlier = 1; earlier <= n; ++earlier) {
    for (int later = earlier + 1; later <= n; ++later) {
      PairExample p;
      p.thread_id = thread.id;
      p.earlier_index = earlier;
      p.later_index = later;
      p.earlier_text = thread.post(earlier).text;
      p.later_text = thread.post(later).text;
      if (thread.gold_parents) {
        auto it = thread.gold_parents->find(later);
        p.label = to_label(it != thread.gold_parents->end() &&
                           it->second == earlier);
      }
      pairs.push_back(std::move(p));
    }
  }
  return pairs;
}

std::vector<PairExample> generate_corpus_pairs(const Corpus& corpus) {
  return kernels::corpus_pairs(corpus);
}

std::vector<PairExample> subsample_negatives(std::vector<PairExample> pairs,
                                             double keep_ratio,
                                             std::uint64_t seed) {
  if (!(keep_ratio >= 0.0 && keep_ratio <= 1.0)) {
    throw usage_error("negative keep ratio must lie in [0, 1]");
  }
  Rng rng(seed);
  std::vector<PairExample> kept;
  kept.reserve(pairs.size());
  for (auto& p : pairs) {
    if (p.label == PairLabel::False && uniform_unit(rng) >= keep_ratio) continue;
    kept.push_back(std::move(p));
  }
  return kept;
}

void SplitSpec::validate() const {
  for (double r : {train_ratio, dev_ratio, test_ratio}) {
    if (!(r >= 0.0 && r <= 1.0)) {
      throw usage_error("split ratios must each lie in [0, 1]");
    }
  }
  if (std::abs(train_ratio + dev_ratio + test_ratio - 1.0) > 1e-9) {
    throw usage_error("split ratios must sum to 1");
  }
}

PairSplit split_pairs(const std::vector<PairExample>& pairs,
                      const SplitSpec& spec) {
  spec.validate();
  for (const auto& p : pairs) {
    if (!p.label) throw data_error("cannot split unlabeled pair " + p.pair_id());
  }
  const std::size_t n = pairs.size();
  // The epsilon absorbs products such as 0.7 * 10 = 6.9999...
  auto portion = [n](double ratio) {
    return static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 1e-9));
  };
  const std::size_t n_train = std::min(n, portion(spec.train_ratio));
  const std::size_t n_dev = std::min(n - n_train, portion(spec.dev_ratio));

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(spec.seed);
  shuffle(std::span(order), rng);

  PairSplit split;
  split.train.reserve(n_train);
  split.dev.reserve(n_dev);
  split.test.reserve(n - n_train - n_dev);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = pairs[order[i]];
    if (i < n_train) {
      split.train.push_back(p);
    } else if (i < n_train + n_dev) {
      split.dev.push_back(p);
    } else {
      split.test.push_back(p);
    }
  }
  return split;
}

void write_pairs(std::ostream& out, const std::vector<PairExample>& pairs) {
  for (const auto& p : pairs) {
    ordered_json obj;
    obj["thread_id"] = p.thread_id;
    obj["earlier_index"] = p.earlier_index;
    obj["later_index"] = p.later_index;
    obj["earlier_text"] = p.earlier_text;
    obj["later_text"] = p.later_text;
    if (p.label) obj["label"] = *p.label == PairLabel::True;
    out << obj.dump() << '\n';
  }
}

std::vector<PairExample> read_pairs(std::istream& in) {
  std::vector<PairExample> pairs;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.find_first_not_of(" \t") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(line) + ": ";
    try {
      const json obj = json::parse(text);
      PairExample p;
      p.thread_id = obj.at("thread_id").get<std::string>();
      p.earlier_index = obj.at("earlier_index").get<int>();
      p.later_index = obj.at("later_index").get<int>();
      p.earlier_text = obj.at("earlier_text").get<std::string>();
      p.later_text = obj.at("later_text").get<std::string>();
      if (auto it = obj.find("label"); it != obj.end() && !it->is_null()) {
        p.label = to_label(it->get<bool>());
      }
      if (p.earlier_index < 1 || p.earlier_index >= p.later_index) {
        throw data_error(where + "pair must satisfy 1 <= earlier_index < later_index");
      }
      pairs.push_back(std::move(p));
    } catch (const json::exception& e) {
      throw data_error(where + "malformed pair record: " + e.what());
    }
  }
  return pairs;
}

std::vector<PairExample> load_pairs(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open pair file '" + path + "'");
  return read_pairs(in);
}

void save_pairs(const std::string& path, const std::vector<PairExample>& pairs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write pair file '" + path + "'");
  write_pairs(out, pairs);
}

}  // namespace threadloom
