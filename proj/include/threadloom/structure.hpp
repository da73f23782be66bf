#pragma once

#include <compare>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "threadloom/corpus.hpp"
#include "threadloom/scorer.hpp"

namespace threadloom {

// A positive (earlier, later) link within one thread.
struct PostPair {
  int earlier = 0;
  int later = 0;

  auto operator<=>(const PostPair&) const = default;
};

using PairSet = std::set<PostPair>;

// Every later post replies to the creator's post: {(1, j) : 2 <= j <= n}.
PairSet creator_network_pairs(const Thread& thread);

// Every post replies to the one before it: {(j-1, j) : 2 <= j <= n}.
PairSet last_reply_pairs(const Thread& thread);

struct ReplyTree {
  std::string thread_id;
  ParentMap parents;

  // Posts 2..n each have exactly one parent, and every parent is earlier.
  void validate(int n) const;

  bool operator==(const ReplyTree&) const = default;
};

ReplyTree gold_tree(const Thread& thread);

// For every child j the parent is the earlier post with the highest score,
// ties going to the most recent candidate; if that best score is below the
// threshold the post attaches to the root. score_of(k, j) must be defined
// for 1 <= k < j <= n.
ParentMap choose_parents(int n, const std::function<double(int, int)>& score_of,
                         double threshold);

// Same rule over a score block laid out in generate_pairs order.
ParentMap choose_parents(int n, std::span<const double> pair_scores, double threshold);

ReplyTree reconstruct_tree(const Thread& thread, const ScorerModel& model,
                           double threshold = 0.5);

// {(parents[j], j) : j = 2..n}
PairSet tree_to_pairs(const ReplyTree& tree, int n);

// Position of (earlier, later) in the generate_pairs order of an n-post thread.
std::size_t pair_offset(int n, int earlier, int later);

struct SocialNetwork {
  std::set<std::string> nodes;
  // (replier, replied-to) -> number of reply links
  std::map<std::pair<std::string, std::string>, int> edges;

  int total_weight() const;

  bool operator==(const SocialNetwork&) const = default;
};

struct NetworkOptions {
  bool drop_self_loops = false;
};

// One unit of weight per parent link, directed from the replying author to
// the author replied to, summed over threads. Every author of a thread with
// a tree becomes a node.
SocialNetwork build_social_network(const Corpus& corpus,
                                   const std::map<std::string, ReplyTree>& trees,
                                   const NetworkOptions& options = {});

enum class GraphFormat { dot, graphml, edge_csv };

GraphFormat parse_graph_format(std::string_view name);

// Nodes, then edges, in lexicographic order. Reply-tree nodes are post
// indices in numeric order and edges run child -> parent with weight 1.
std::string export_graph(const SocialNetwork& network, GraphFormat format);
std::string export_graph(const ReplyTree& tree, GraphFormat format);

// Line-delimited {thread_id, parents: {"child": parent}}.
void write_trees(std::ostream& out, const std::vector<ReplyTree>& trees);
std::vector<ReplyTree> read_trees(std::istream& in);

}  // namespace threadloom
