// threadloom: reply-structure reconstruction for forum threads.
//
//   threadloom synth   --seed 7 --threads 20 --out corpus.jsonl
//   threadloom pairs   --in corpus.jsonl --out pairs.jsonl
//   threadloom split   --in pairs.jsonl --out pairs --ratios 0.6,0.1,0.3
//   threadloom train   --in pairs.train --corpus corpus.jsonl --out model.txt
//   threadloom eval    --in corpus.jsonl --pairs pairs.test --method co,lr,classify \
//                      --scorer feature --model model.txt
//
// Exit status: 0 success, 1 data error, 2 usage error, 3 scorer transport error.

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "threadloom/corpus.hpp"
#include "threadloom/error.hpp"
#include "threadloom/eval.hpp"
#include "threadloom/kernels.hpp"
#include "threadloom/pairing.hpp"
#include "threadloom/prompting.hpp"
#include "threadloom/reference.hpp"
#include "threadloom/scorer.hpp"
#include "threadloom/structure.hpp"
#include "threadloom/synth.hpp"

namespace tl = threadloom;

namespace {

// Opens --out, or stdout for "" / "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw tl::data_error("cannot write '" + path + "'");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

class Input {
 public:
  explicit Input(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ifstream>(path, std::ios::binary);
    if (!*file_) throw tl::data_error("cannot open '" + path + "'");
  }
  std::istream& stream() { return file_ ? *file_ : std::cin; }

 private:
  std::unique_ptr<std::ifstream> file_;
};

struct Flags {
  std::string in;
  std::string out;
  std::string corpus;
  std::string model;
  std::string scorer = "feature";
  std::string trees;
  std::string pairs;
  std::string records;
  std::string instruction;
  std::string ratios = "0.6,0.1,0.3";
  std::string format = "dot";
  std::string methods = "co,lr";
  std::string shape = "random";
  std::string quote_open = "[quote]";
  std::string quote_close = "[/quote]";
  double threshold = 0.5;
  double coupling = 0.6;
  double negative_ratio = 1.0;
  std::uint64_t seed = 0;
  int threads = 20;
  int min_posts = 10;
  int max_posts = 20;
  bool strip_quotes = false;
  bool plain = false;
  bool per_source = false;
  bool reference = false;
  bool drop_self_loops = false;
  tl::TrainConfig train;
};

tl::Corpus read_corpus(const Flags& f, const std::string& path) {
  Input in(path);
  std::string name = path.empty() || path == "-" ? "stdin" : path;
  if (auto slash = name.find_last_of('/'); slash != std::string::npos) name.erase(0, slash + 1);
  if (auto dot = name.find('.'); dot != std::string::npos && dot > 0) name.erase(dot);
  tl::Corpus corpus = tl::parse_corpus(in.stream(), name);
  if (f.strip_quotes) {
    corpus = tl::strip_corpus_quotes(corpus, {f.quote_open, f.quote_close},
                                     [](std::string_view msg) {
                                       std::cerr << "warning: " << msg << '\n';
                                     });
  }
  return corpus;
}

std::vector<tl::PairExample> read_pair_file(const std::string& path) {
  Input in(path);
  return tl::read_pairs(in.stream());
}

tl::SplitSpec parse_ratios(const std::string& text, std::uint64_t seed) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw tl::usage_error("--ratios expects three numbers, got '" + text + "'");
    }
  }
  if (parts.size() != 3) throw tl::usage_error("--ratios expects three numbers, got '" + text + "'");
  tl::SplitSpec spec{parts[0], parts[1], parts[2], seed};
  spec.validate();
  return spec;
}

tl::ScorerModel make_scorer(const Flags& f) {
  tl::ScorerModel model = tl::parse_scorer_spec(f.scorer, f.model);
  if (model.kind == tl::ScorerKind::external) {
    if (f.plain) {
      model.prompt = tl::plain_template();
    } else if (!f.instruction.empty()) {
      model.prompt.instruction = tl::load_text_file(f.instruction);
    }
  }
  return model;
}

tl::PromptTemplate make_template(const Flags& f) {
  if (f.plain) return tl::plain_template();
  tl::PromptTemplate t = tl::default_template();
  if (!f.instruction.empty()) t.instruction = tl::load_text_file(f.instruction);
  t.validate_instructed();
  return t;
}

void cmd_ingest(const Flags& f) {
  const tl::Corpus corpus = read_corpus(f, f.in);
  Output out(f.out);
  tl::write_corpus(out.stream(), corpus);
  std::size_t posts = 0;
  for (const auto& t : corpus.threads) posts += t.posts.size();
  std::cerr << "threads " << corpus.threads.size() << "  posts " << posts << "  posts/thread "
            << (corpus.threads.empty() ? 0.0 : static_cast<double>(posts) / corpus.threads.size())
            << '\n';
}

void cmd_synth(const Flags& f) {
  tl::SynthOptions o;
  o.seed = f.seed;
  o.n_threads = f.threads;
  o.min_posts = f.min_posts;
  o.max_posts = f.max_posts;
  o.vocab_coupling = f.coupling;
  if (f.shape == "random") {
    o.shape = tl::TreeShape::random;
  } else if (f.shape == "chain") {
    o.shape = tl::TreeShape::chain;
  } else if (f.shape == "star") {
    o.shape = tl::TreeShape::star;
  } else {
    throw tl::usage_error("--shape must be random, chain or star");
  }
  Output out(f.out);
  tl::write_corpus(out.stream(), tl::synth_corpus(o));
}

void cmd_pairs(const Flags& f) {
  const tl::Corpus corpus = read_corpus(f, f.in);
  auto pairs = tl::generate_corpus_pairs(corpus);
  if (f.negative_ratio < 1.0) pairs = tl::subsample_negatives(std::move(pairs), f.negative_ratio, f.seed);
  Output out(f.out);
  tl::write_pairs(out.stream(), pairs);
}

void cmd_prompt(const Flags& f) {
  const auto pairs = read_pair_file(f.in);
  const tl::PromptTemplate t = make_template(f);
  std::vector<tl::PromptedExample> prompted;
  prompted.reserve(pairs.size());
  for (const auto& p : pairs) prompted.push_back(tl::render_prompt(t, p));
  Output out(f.out);
  tl::write_prompted(out.stream(), prompted);
}

void cmd_split(const Flags& f) {
  const auto spec = parse_ratios(f.ratios, f.seed);
  const auto split = tl::split_pairs(read_pair_file(f.in), spec);
  std::string prefix = f.out;
  if (prefix.empty()) {
    if (f.in.empty() || f.in == "-") throw tl::usage_error("split needs --out when reading stdin");
    prefix = f.in;
  }
  tl::save_pairs(prefix + ".train", split.train);
  tl::save_pairs(prefix + ".dev", split.dev);
  tl::save_pairs(prefix + ".test", split.test);
  std::cerr << "train " << split.train.size() << "  dev " << split.dev.size() << "  test "
            << split.test.size() << '\n';
}

void cmd_train(const Flags& f) {
  const tl::Corpus corpus = read_corpus(f, f.corpus);
  const auto pairs = read_pair_file(f.in);
  const auto features = tl::kernels::pair_features(corpus, pairs);
  std::vector<tl::LabeledFeatures> train;
  train.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!pairs[i].label) throw tl::data_error("training pair " + pairs[i].pair_id() + " is unlabeled");
    train.push_back({features[i], *pairs[i].label});
  }
  tl::TrainConfig config = f.train;
  config.seed = f.seed;
  const auto model = tl::train_feature_scorer(train, config);
  Output out(f.out);
  tl::write_model(out.stream(), model);
}

void cmd_score(const Flags& f) {
  const tl::Corpus corpus = read_corpus(f, f.corpus);
  const auto pairs = read_pair_file(f.in);
  const auto model = make_scorer(f);
  const auto scores = tl::kernels::pair_scores(model, corpus, pairs);
  Output out(f.out);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    nlohmann::ordered_json obj;
    obj["pair_id"] = pairs[i].pair_id();
    obj["score"] = scores[i];
    out.stream() << obj.dump() << '\n';
  }
}

void cmd_predict(const Flags& f) {
  tl::validate_threshold(f.threshold);
  const tl::Corpus corpus = read_corpus(f, f.in);
  const auto trees = tl::kernels::reconstruct_trees(corpus, make_scorer(f), f.threshold);
  Output out(f.out);
  tl::write_trees(out.stream(), trees);
}

void cmd_network(const Flags& f) {
  const tl::Corpus corpus = read_corpus(f, f.in);
  std::map<std::string, tl::ReplyTree> trees;
  if (!f.trees.empty()) {
    Input in(f.trees);
    for (auto& t : tl::read_trees(in.stream())) {
      const std::string id = t.thread_id;
      if (!trees.emplace(id, std::move(t)).second) {
        throw tl::data_error("duplicate tree for thread '" + id + "'");
      }
    }
  } else {
    for (const auto& t : corpus.threads) trees.emplace(t.id, tl::gold_tree(t));
  }
  const auto network = tl::build_social_network(corpus, trees, {f.drop_self_loops});
  Output out(f.out);
  out.stream() << tl::export_graph(network, tl::parse_graph_format(f.format));
}

void cmd_eval(const Flags& f) {
  tl::validate_threshold(f.threshold);
  const tl::Corpus corpus = read_corpus(f, f.in);
  std::vector<tl::PairExample> universe;
  if (!f.pairs.empty()) universe = read_pair_file(f.pairs);

  // Baselines and oracle methods need no trained model.
  std::optional<tl::ScorerModel> scorer;
  std::vector<tl::Method> methods;
  std::stringstream ss(f.methods);
  std::string name;
  while (std::getline(ss, name, ',')) {
    if (name.empty()) continue;
    const bool needs_scorer = name == "classify" || name == "tree";
    if (needs_scorer && !scorer) scorer = make_scorer(f);
    methods.push_back(tl::parse_method(name, scorer.value_or(tl::ScorerModel::constant(0.5)),
                                       f.threshold));
  }
  if (methods.empty()) throw tl::usage_error("--method names no method");

  std::optional<std::span<const tl::PairExample>> span;
  if (!f.pairs.empty()) span = std::span<const tl::PairExample>(universe);
  const auto report = tl::evaluate(corpus, methods, f.seed, span);

  Output out(f.out);
  out.stream() << tl::render_report_table(report, f.per_source);
  if (f.reference) {
    out.stream() << '\n' << tl::compare_with_reference(report, tl::reference_results());
  }
  if (!f.records.empty()) {
    Output records(f.records);
    records.stream() << tl::render_report_records(report, f.per_source);
  }
}

int exit_code(tl::ErrorKind kind) {
  switch (kind) {
    case tl::ErrorKind::usage: return 2;
    case tl::ErrorKind::data: return 1;
    case tl::ErrorKind::transport: return 3;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reply-structure reconstruction for forum threads", "threadloom"};
  app.require_subcommand(1);
  Flags f;

  auto corpus_in = [&](CLI::App* sub) {
    sub->add_option("--in", f.in, "Corpus file (- for stdin)")->required();
    sub->add_flag("--strip-nested-quotes", f.strip_quotes, "Remove quotes nested inside quotes");
    sub->add_option("--quote-open", f.quote_open, "Quote open marker")->capture_default_str();
    sub->add_option("--quote-close", f.quote_close, "Quote close marker")->capture_default_str();
  };
  auto context_corpus = [&](CLI::App* sub) {
    sub->add_option("--corpus", f.corpus, "Corpus the pairs come from")->required();
    sub->add_flag("--strip-nested-quotes", f.strip_quotes, "Remove quotes nested inside quotes");
    sub->add_option("--quote-open", f.quote_open, "Quote open marker")->capture_default_str();
    sub->add_option("--quote-close", f.quote_close, "Quote close marker")->capture_default_str();
  };
  auto scorer_opts = [&](CLI::App* sub) {
    sub->add_option("--scorer", f.scorer, "feature | constant:<v> | oracle | external:<endpoint>")
        ->capture_default_str();
    sub->add_option("--model", f.model, "Weight file for --scorer feature");
    sub->add_flag("--plain", f.plain, "External scorer gets pairs without the instruction block");
    sub->add_option("--instruction", f.instruction, "Instruction text file for external scorers");
  };
  auto out_opt = [&](CLI::App* sub, const char* what) {
    sub->add_option("--out", f.out, what);
  };

  auto* ingest = app.add_subcommand("ingest", "Validate and normalize a corpus");
  corpus_in(ingest);
  out_opt(ingest, "Normalized corpus (default stdout)");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus with gold trees");
  synth->add_option("--seed", f.seed, "Random seed")->capture_default_str();
  synth->add_option("--threads", f.threads, "Number of threads")->capture_default_str();
  synth->add_option("--min-posts", f.min_posts, "Fewest posts per thread")->capture_default_str();
  synth->add_option("--max-posts", f.max_posts, "Most posts per thread")->capture_default_str();
  synth->add_option("--coupling", f.coupling, "Share of content words inherited from the parent")
      ->capture_default_str();
  synth->add_option("--shape", f.shape, "random | chain | star")->capture_default_str();
  out_opt(synth, "Corpus file (default stdout)");

  auto* pairs = app.add_subcommand("pairs", "Emit every (earlier, later) post pair");
  corpus_in(pairs);
  pairs->add_option("--negative-ratio", f.negative_ratio, "Share of negative pairs kept")
      ->capture_default_str();
  pairs->add_option("--seed", f.seed, "Seed for negative subsampling")->capture_default_str();
  out_opt(pairs, "Pair file (default stdout)");

  auto* prompt = app.add_subcommand("prompt", "Render pairs as instruction prompts");
  prompt->add_option("--in", f.in, "Pair file (- for stdin)")->required();
  prompt->add_flag("--plain", f.plain, "Omit the instruction block");
  prompt->add_option("--instruction", f.instruction, "Replace the instruction block with a file");
  out_opt(prompt, "Prompted-pair file (default stdout)");

  auto* split = app.add_subcommand("split", "Seeded train/dev/test split of a pair file");
  split->add_option("--in", f.in, "Pair file")->required();
  split->add_option("--ratios", f.ratios, "train,dev,test")->capture_default_str();
  split->add_option("--seed", f.seed, "Shuffle seed")->capture_default_str();
  out_opt(split, "Output prefix; writes <prefix>.train/.dev/.test");

  auto* train = app.add_subcommand("train", "Fit the feature scorer");
  train->add_option("--in", f.in, "Labeled pair file")->required();
  context_corpus(train);
  train->add_option("--lr", f.train.learning_rate, "Learning rate")->capture_default_str();
  train->add_option("--l2", f.train.l2, "L2 penalty")->capture_default_str();
  train->add_option("--epochs", f.train.epochs, "Gradient steps")->capture_default_str();
  train->add_option("--tol", f.train.convergence_tol, "Stop when the loss moves less")
      ->capture_default_str();
  train->add_option("--seed", f.seed, "Seed")->capture_default_str();
  out_opt(train, "Model file (default stdout)");

  auto* score = app.add_subcommand("score", "Score pairs");
  score->add_option("--in", f.in, "Pair file")->required();
  context_corpus(score);
  scorer_opts(score);
  out_opt(score, "Score file (default stdout)");

  auto* predict = app.add_subcommand("predict", "Reconstruct a reply tree per thread");
  corpus_in(predict);
  scorer_opts(predict);
  predict->add_option("--threshold", f.threshold, "Root fallback threshold")->capture_default_str();
  out_opt(predict, "Tree file (default stdout)");

  auto* network = app.add_subcommand("network", "Build and export the user reply network");
  corpus_in(network);
  network->add_option("--trees", f.trees, "Tree file from predict (default: gold trees)");
  network->add_option("--format", f.format, "dot | graphml | edge-csv")->capture_default_str();
  network->add_flag("--drop-self-loops", f.drop_self_loops, "Skip replies to oneself");
  out_opt(network, "Graph file (default stdout)");

  auto* eval = app.add_subcommand("eval", "Pairwise precision/recall/F1 against gold trees");
  corpus_in(eval);
  eval->add_option("--pairs", f.pairs, "Evaluate only these pairs (e.g. a .test split)");
  eval->add_option("--method", f.methods, "Comma list: co,lr,classify,tree,oracle,oracle-tree")
      ->capture_default_str();
  scorer_opts(eval);
  eval->add_option("--threshold", f.threshold, "Decision threshold")->capture_default_str();
  eval->add_option("--seed", f.seed, "Seed echoed in the report")->capture_default_str();
  eval->add_flag("--per-source", f.per_source, "Break results down by forum/topic");
  eval->add_flag("--reference", f.reference, "Append the published result tables");
  eval->add_option("--records", f.records, "Also write line-delimited records here");
  out_opt(eval, "Report (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (ingest->parsed()) cmd_ingest(f);
    if (synth->parsed()) cmd_synth(f);
    if (pairs->parsed()) cmd_pairs(f);
    if (prompt->parsed()) cmd_prompt(f);
    if (split->parsed()) cmd_split(f);
    if (train->parsed()) cmd_train(f);
    if (score->parsed()) cmd_score(f);
    if (predict->parsed()) cmd_predict(f);
    if (network->parsed()) cmd_network(f);
    if (eval->parsed()) cmd_eval(f);
  } catch (const tl::Error& e) {
    std::cerr << "threadloom: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "threadloom: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
