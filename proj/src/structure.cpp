#include "threadloom/structure.hpp"

#include <charconv>
#include <istream>
#include <ostream>

#include "json.hpp"
#include "threadloom/error.hpp"

namespace threadloom {

PairSet creator_network_pairs(const Thread& thread) {
  PairSet out;
  for (int j = 2; j <= thread.size(); ++j) out.insert({1, j});
  return out;
}

PairSet last_reply_pairs(const Thread& thread) {
  PairSet out;
  for (int j = 2; j <= thread.size(); ++j) out.insert({j - 1, j});
  return out;
}

void ReplyTree::validate(int n) const {
  if (static_cast<int>(parents.size()) != std::max(0, n - 1)) {
    throw data_error("reply tree for '" + thread_id + "' must have " +
                     std::to_string(std::max(0, n - 1)) + " links");
  }
  for (const auto& [child, parent] : parents) {
    if (child < 2 || child > n || parent < 1 || parent >= child) {
      throw data_error("reply tree for '" + thread_id + "' has invalid link " +
                       std::to_string(child) + "->" + std::to_string(parent));
    }
  }
}

ReplyTree gold_tree(const Thread& thread) {
  if (!thread.gold_parents) {
    throw data_error("thread '" + thread.id + "' has no gold parents");
  }
  return {thread.id, *thread.gold_parents};
}

ParentMap choose_parents(int n, const std::function<double(int, int)>& score_of,
                         double threshold) {
  validate_threshold(threshold);
  ParentMap parents;
  for (int j = 2; j <= n; ++j) {
    int best = 1;
    double best_score = score_of(1, j);
    for (int k = 2; k < j; ++k) {
      const double s = score_of(k, j);
      if (s >= best_score) {
        best = k;
        best_score = s;
      }
    }
    parents[j] = best_score < threshold ? 1 : best;
  }
  return parents;
}

std::size_t pair_offset(int n, int earlier, int later) {
  // Rows for earlier = 1..earlier-1 hold (n - 1) + ... + (n - earlier + 1) pairs.
  const auto e = static_cast<std::size_t>(earlier - 1);
  const auto nn = static_cast<std::size_t>(n);
  return e * nn - e * (e + 1) / 2 + static_cast<std::size_t>(later - earlier - 1);
}

ParentMap choose_parents(int n, std::span<const double> pair_scores, double threshold) {
  const auto expected = static_cast<std::size_t>(n) * (n > 0 ? n - 1 : 0) / 2;
  if (pair_scores.size() != expected) {
    throw usage_error("score block size does not match thread size");
  }
  return choose_parents(
      n, [&](int k, int j) { return pair_scores[pair_offset(n, k, j)]; }, threshold);
}

ReplyTree reconstruct_tree(const Thread& thread, const ScorerModel& model, double threshold) {
  validate_threshold(threshold);
  const auto pairs = generate_pairs(thread);
  const auto scores = score_thread_pairs(model, thread, pairs);
  return {thread.id, choose_parents(thread.size(), scores, threshold)};
}

PairSet tree_to_pairs(const ReplyTree& tree, int n) {
  tree.validate(n);
  PairSet out;
  for (const auto& [child, parent] : tree.parents) out.insert({parent, child});
  return out;
}

int SocialNetwork::total_weight() const {
  int total = 0;
  for (const auto& [_, w] : edges) total += w;
  return total;
}

SocialNetwork build_social_network(const Corpus& corpus,
                                   const std::map<std::string, ReplyTree>& trees,
                                   const NetworkOptions& options) {
  SocialNetwork net;
  for (const auto& [id, tree] : trees) {
    const Thread* thread = corpus.find(id);
    if (thread == nullptr) throw data_error("reply tree references unknown thread '" + id + "'");
    tree.validate(thread->size());
    for (const Post& p : thread->posts) net.nodes.insert(p.author);
    for (const auto& [child, parent] : tree.parents) {
      const std::string& from = thread->post(child).author;
      const std::string& to = thread->post(parent).author;
      if (options.drop_self_loops && from == to) continue;
      ++net.edges[{from, to}];
    }
  }
  return net;
}

GraphFormat parse_graph_format(std::string_view name) {
  if (name == "dot") return GraphFormat::dot;
  if (name == "graphml") return GraphFormat::graphml;
  if (name == "edge-csv") return GraphFormat::edge_csv;
  throw usage_error("unknown graph format '" + std::string(name) +
                    "' (expected dot, graphml or edge-csv)");
}

namespace {

struct Edge {
  std::string from;
  std::string to;
  int weight;
};

std::string dot_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string render(const std::vector<std::string>& nodes, const std::vector<Edge>& edges,
                   GraphFormat format) {
  std::string out;
  switch (format) {
    case GraphFormat::dot:
      out = "digraph g {\n";
      for (const auto& n : nodes) out += "  " + dot_quote(n) + ";\n";
      for (const auto& e : edges) {
        out += "  " + dot_quote(e.from) + " -> " + dot_quote(e.to) +
               " [weight=" + std::to_string(e.weight) + "];\n";
      }
      out += "}\n";
      break;
    case GraphFormat::graphml:
      out =
          "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
          "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
          "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"int\"/>\n"
          "  <graph id=\"g\" edgedefault=\"directed\">\n";
      for (const auto& n : nodes) out += "    <node id=\"" + xml_escape(n) + "\"/>\n";
      for (const auto& e : edges) {
        out += "    <edge source=\"" + xml_escape(e.from) + "\" target=\"" +
               xml_escape(e.to) + "\"><data key=\"weight\">" +
               std::to_string(e.weight) + "</data></edge>\n";
      }
      out += "  </graph>\n</graphml>\n";
      break;
    case GraphFormat::edge_csv:
      out = "from,to,weight\n";
      for (const auto& e : edges) {
        out += csv_field(e.from) + "," + csv_field(e.to) + "," + std::to_string(e.weight) + "\n";
      }
      break;
  }
  return out;
}

}  // namespace

std::string export_graph(const SocialNetwork& network, GraphFormat format) {
  std::vector<std::string> nodes(network.nodes.begin(), network.nodes.end());
  std::vector<Edge> edges;
  for (const auto& [key, w] : network.edges) {
    if (!network.nodes.contains(key.first) || !network.nodes.contains(key.second) || w < 1) {
      throw data_error("social network edge " + key.first + "->" + key.second + " is invalid");
    }
    edges.push_back({key.first, key.second, w});
  }
  return render(nodes, edges, format);
}

std::string export_graph(const ReplyTree& tree, GraphFormat format) {
  tree.validate(static_cast<int>(tree.parents.size()) + 1);
  std::vector<std::string> nodes;
  for (int i = 1; i <= static_cast<int>(tree.parents.size()) + 1; ++i) {
    nodes.push_back(std::to_string(i));
  }
  std::vector<Edge> edges;
  for (const auto& [child, parent] : tree.parents) {
    edges.push_back({std::to_string(child), std::to_string(parent), 1});
  }
  return render(nodes, edges, format);
}

void write_trees(std::ostream& out, const std::vector<ReplyTree>& trees) {
  for (const auto& t : trees) {
    nlohmann::ordered_json obj;
    obj["thread_id"] = t.thread_id;
    nlohmann::ordered_json parents = nlohmann::ordered_json::object();
    for (const auto& [child, parent] : t.parents) parents[std::to_string(child)] = parent;
    obj["parents"] = std::move(parents);
    out << obj.dump() << '\n';
  }
}

std::vector<ReplyTree> read_trees(std::istream& in) {
  std::vector<ReplyTree> trees;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(line) + ": ";
    try {
      const auto obj = nlohmann::json::parse(text);
      ReplyTree tree;
      tree.thread_id = obj.at("thread_id").get<std::string>();
      for (const auto& [key, value] : obj.at("parents").items()) {
        int child = 0;
        auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), child);
        if (ec != std::errc() || ptr != key.data() + key.size()) {
          throw data_error(where + "tree key '" + key + "' is not a decimal index");
        }
        tree.parents[child] = value.get<int>();
      }
      trees.push_back(std::move(tree));
    } catch (const nlohmann::json::exception& e) {
      throw data_error(where + "malformed tree record: " + e.what());
    }
  }
  return trees;
}

}  // namespace threadloom
