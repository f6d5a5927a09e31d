// hyperrec: staged command-line driver for the hypergraph recommender.
//
//   hyperrec synth       --out DIR                 synthetic dataset files
//   hyperrec build-graph --data DIR --out DIR      edges.jsonl + graph.json
//   hyperrec walk        --data DIR --out DIR      walks.txt
//   hyperrec train       --data DIR --out DIR      embeddings.bin
//   hyperrec recommend   --data DIR --out DIR      recommendations.tsv
//   hyperrec evaluate    --data DIR --out DIR      metrics.csv + metrics.json
//   hyperrec ablate      --data DIR --out DIR      ablation.csv
//
// Exit codes: 0 success, 1 validation, 2 I/O, 3 internal.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hyperrec/config.hpp"
#include "hyperrec/error.hpp"
#include "hyperrec/pipeline.hpp"

namespace fs = std::filesystem;
using namespace hyperrec;

namespace {

enum Exit { kOk = 0, kValidation = 1, kIo = 2, kInternal = 3 };

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kValidation:
    case ErrorKind::kParse:
    case ErrorKind::kLookup:
    case ErrorKind::kFingerprint:
      return kValidation;
    case ErrorKind::kIo:
    case ErrorKind::kFormat:
      return kIo;
    case ErrorKind::kInternal:
      return kInternal;
  }
  return kInternal;
}

std::string hex(std::uint64_t x) {
  std::ostringstream s;
  s << std::setw(16) << std::setfill('0') << std::hex << x;
  return s.str();
}

// Flag values kept as text and applied through PipelineConfig::set so
// that flags and config files share one parser.
struct Flags {
  std::optional<std::string> config, seed, threads, iterations, walk_length, dim, window, topn, mode, alpha,
      stay_prob, disable_edges, out, data, fold, folds, epochs, negatives, method, similarity, top_k, workers;
};

void add_pipeline_flags(CLI::App& app, Flags& f) {
  app.add_option("--config", f.config, "key=value config file");
  app.add_option("--seed", f.seed, "master seed for split, walks and embeddings");
  app.add_option("--threads", f.threads, "worker cap (falls back to HYPERREC_THREADS)");
  app.add_option("--iterations,--r", f.iterations, "walks per start vertex (r)");
  app.add_option("--walk-length,--k", f.walk_length, "vertices per walk (k)");
  app.add_option("--dim,--s", f.dim, "embedding dimension (s)");
  app.add_option("--window,--w", f.window, "skip-gram window radius (w)");
  app.add_option("--topn", f.topn, "list lengths, e.g. 10,20,50");
  app.add_option("--mode", f.mode, "relevance_only | literal_diversity | mmr_greedy");
  app.add_option("--alpha", f.alpha, "adaptive or a fixed value in [0,1]");
  app.add_option("--stay-prob", f.stay_prob, "probability of staying on the current hyperedge");
  app.add_option("--disable-edges", f.disable_edges, "comma list of e2,e3,e4");
  app.add_option("--out", f.out, "artifact directory");
  app.add_option("--data", f.data, "directory holding interactions.tsv, catalog.tsv, tags.tsv");
  app.add_option("--fold", f.fold, "fold used by the staged commands");
  app.add_option("--folds", f.folds, "number of folds");
  app.add_option("--epochs", f.epochs, "skip-gram epochs");
  app.add_option("--negatives", f.negatives, "negative samples per pair");
  app.add_option("--method", f.method, "dwhrec | popularity");
  app.add_option("--similarity", f.similarity, "dot | cosine");
  app.add_option("--top-k", f.top_k, "per-user interaction cap");
  app.add_option("--workers", f.workers, "skip-gram workers (1 = deterministic)");
}

PipelineConfig resolve(const Flags& f) {
  PipelineConfig cfg;
  if (f.config) cfg.load_file(*f.config);
  if (const char* env = std::getenv("HYPERREC_THREADS"); env && !f.threads) cfg.set("threads", env);
  const std::pair<const std::optional<std::string>*, const char*> table[] = {
      {&f.data, "dataset.dir"},          {&f.seed, "seed"},
      {&f.threads, "threads"},           {&f.iterations, "walk.iterations"},
      {&f.walk_length, "walk.length"},   {&f.dim, "embedding.dim"},
      {&f.window, "embedding.window"},   {&f.topn, "ranker.n"},
      {&f.mode, "ranker.mode"},          {&f.alpha, "ranker.alpha"},
      {&f.stay_prob, "walk.stay_probability"}, {&f.disable_edges, "graph.disable"},
      {&f.out, "out"},                   {&f.fold, "split.fold"},
      {&f.folds, "split.folds"},         {&f.epochs, "embedding.epochs"},
      {&f.negatives, "embedding.negatives"}, {&f.method, "method"},
      {&f.similarity, "ranker.similarity"},  {&f.top_k, "dataset.top_k"},
      {&f.workers, "embedding.workers"},
  };
  for (const auto& [value, key] : table) {
    if (*value) cfg.set(key, **value);
  }
  cfg.validate();
  return cfg;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

void report_skipped(const SplitResult& split) {
  for (const auto& u : split.skipped_users) {
    std::cerr << "warning: user " << u << " has a single track and is left out of evaluation\n";
  }
}

FoldData stage_fold(const PipelineConfig& cfg) {
  const Dataset data = load_dataset(cfg);
  FoldData fold = prepare_fold(data, cfg, cfg.split.fold_index);
  report_skipped(fold.split);
  return fold;
}

int cmd_synth(const Flags& f, const SyntheticSpec& base) {
  const PipelineConfig cfg = resolve(f);
  SyntheticSpec spec = base;
  if (f.seed) spec.seed = cfg.split.seed;
  const SyntheticDataset data = generate_synthetic(spec);
  ensure_dir(cfg.out);
  write_interactions(cfg.out / "interactions.tsv", data.interactions);
  write_catalog(cfg.out / "catalog.tsv", data.catalog);
  write_tags(cfg.out / "tags.tsv", data.tags);
  std::cout << "wrote " << data.interactions.size() << " listening events for " << data.interactions.user_count()
            << " users and " << data.catalog.size() << " tracks to " << cfg.out.string() << "\n";
  return kOk;
}

int cmd_build_graph(const Flags& f) {
  const PipelineConfig cfg = resolve(f);
  const FoldData fold = stage_fold(cfg);
  ensure_dir(cfg.out);
  write_edges_jsonl(cfg.out / "edges.jsonl", fold.graph);
  nlohmann::ordered_json meta;
  meta["fingerprint"] = hex(fold.graph.fingerprint());
  meta["fold"] = cfg.split.fold_index;
  meta["vertices"] = fold.graph.vertex_count();
  meta["edges"] = fold.graph.edge_count();
  for (auto k : {EdgeKind::kUserTrack, EdgeKind::kTagTrack, EdgeKind::kAlbumTrack, EdgeKind::kArtistTrack}) {
    meta["edge_counts"][std::string(to_string(k))] = fold.graph.count_edges(k);
  }
  std::ofstream(cfg.out / "graph.json") << meta.dump(2) << '\n';
  std::cout << "graph " << hex(fold.graph.fingerprint()) << ": " << fold.graph.vertex_count() << " vertices, "
            << fold.graph.edge_count() << " hyperedges\n";
  return kOk;
}

int cmd_walk(const Flags& f) {
  const PipelineConfig cfg = resolve(f);
  const FoldData fold = stage_fold(cfg);
  const WalkCorpus corpus = generate_walks(fold.graph, cfg.walk);
  for (VertexIndex v : corpus.skipped) {
    std::cerr << "warning: vertex " << fold.graph.vertex(v).key << " has no hyperedge; no walks start there\n";
  }
  ensure_dir(cfg.out);
  write_corpus(cfg.out / "walks.txt", corpus);
  std::cout << "wrote " << corpus.walks.size() << " walks (" << corpus.token_count() << " vertices)\n";
  return kOk;
}

int cmd_train(const Flags& f, bool text) {
  const PipelineConfig cfg = resolve(f);
  const FoldData fold = stage_fold(cfg);
  const WalkCorpus corpus = read_corpus(cfg.out / "walks.txt");
  if (corpus.graph_fingerprint != fold.graph.fingerprint()) {
    throw FingerprintError("walks.txt belongs to graph " + hex(corpus.graph_fingerprint) +
                           " but this dataset and fold give graph " + hex(fold.graph.fingerprint()) +
                           "; rerun `hyperrec walk` with the same config");
  }
  const TrainedEmbedding trained = train_skipgram(corpus, fold.graph.vertex_count(), cfg.embedding);
  save_embeddings(cfg.out / "embeddings.bin", trained.table);
  if (text) {
    std::vector<std::string> keys;
    for (const auto& v : fold.graph.vertices()) keys.push_back(std::string(to_string(v.kind)) + ":" + v.key);
    std::ofstream out(cfg.out / "embeddings.txt");
    export_embeddings_text(out, trained.table, keys);
  }
  std::cout << "trained " << trained.table.rows() << " x " << trained.table.dimension() << " embeddings; loss";
  for (double l : trained.report.epoch_loss) std::cout << ' ' << l;
  std::cout << '\n';
  return kOk;
}

int cmd_recommend(const Flags& f) {
  const PipelineConfig cfg = resolve(f);
  const FoldData fold = stage_fold(cfg);
  EmbeddingTable embeddings;
  if (cfg.method == Method::kHypergraph) {
    embeddings = load_embeddings(cfg.out / "embeddings.bin", fold.graph.fingerprint());
  }
  std::vector<std::string> users;
  for (auto rows : fold.split.train.by_user()) users.push_back(rows.front().user);
  const auto lists = recommend_all(fold, embeddings, cfg, users);
  write_recommendations(cfg.out / "recommendations.tsv", lists);
  std::cout << "wrote lists of up to " << cfg.max_n() << " tracks for " << lists.size() << " users\n";
  return kOk;
}

void print_table(const std::vector<std::pair<std::string, const MetricsReport*>>& rows, std::size_t n) {
  constexpr int kWidth = 15;
  std::cout << std::left << std::setw(kWidth) << "";
  for (Metric m : kAllMetrics) std::cout << std::setw(kWidth) << (std::string(to_string(m)) + "@" + std::to_string(n));
  std::cout << '\n' << std::fixed << std::setprecision(4);
  for (const auto& [label, report] : rows) {
    std::cout << std::setw(kWidth) << label;
    for (Metric m : kAllMetrics) std::cout << std::setw(kWidth) << report->mean_value(m, n);
    std::cout << '\n';
  }
  std::cout.unsetf(std::ios::fixed);
}

std::size_t headline_n(const PipelineConfig& cfg) {
  for (std::size_t n : cfg.ns) {
    if (n == 20) return 20;
  }
  return cfg.ns.front();
}

int cmd_evaluate(const Flags& f) {
  const PipelineConfig cfg = resolve(f);
  const Dataset data = load_dataset(cfg);
  const MetricsReport report = evaluate(data, cfg);
  ensure_dir(cfg.out);
  write_metrics_csv(cfg.out / "metrics.csv", report);
  write_metrics_json(cfg.out / "metrics.json", report);
  print_table({{std::string(to_string(cfg.method)), &report}}, headline_n(cfg));
  return kOk;
}

int cmd_ablate(const Flags& f) {
  const PipelineConfig cfg = resolve(f);
  const Dataset data = load_dataset(cfg);
  const auto rows = ablate(data, cfg);
  ensure_dir(cfg.out);
  std::ofstream out(cfg.out / "ablation.csv", std::ios::binary);
  if (!out) throw IoError("cannot write " + (cfg.out / "ablation.csv").string());
  out << "variant,metric,n,value\n" << std::setprecision(17);
  for (const auto& row : rows) {
    for (Metric m : kAllMetrics) {
      for (std::size_t n : row.report.ns) out << row.label << ',' << to_string(m) << ',' << n << ',' << row.report.mean_value(m, n) << '\n';
    }
  }
  std::vector<std::pair<std::string, const MetricsReport*>> table;
  for (const auto& row : rows) table.emplace_back(row.label, &row.report);
  print_table(table, headline_n(cfg));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hypergraph random-walk music recommender"};
  app.require_subcommand(1);
  Flags flags;

  SyntheticSpec synth_spec;
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  synth->add_option("--users", synth_spec.users);
  synth->add_option("--tracks", synth_spec.tracks);
  synth->add_option("--artists", synth_spec.artists);
  synth->add_option("--albums", synth_spec.albums);
  synth->add_option("--tags", synth_spec.tags);
  synth->add_option("--per-user", synth_spec.tracks_per_user, "distinct tracks per user (0 = auto)");
  synth->add_option("--clusters", synth_spec.clusters, "latent taste clusters (0 = auto)");

  bool text_export = false;
  auto* build = app.add_subcommand("build-graph", "build the hypergraph for one fold and dump its edges");
  auto* walk = app.add_subcommand("walk", "generate the random-walk corpus");
  auto* train = app.add_subcommand("train", "train skip-gram embeddings from walks.txt");
  train->add_flag("--text", text_export, "also write embeddings.txt");
  auto* rec = app.add_subcommand("recommend", "write top-n lists for every user");
  auto* eval = app.add_subcommand("evaluate", "run every fold and write metrics");
  auto* abl = app.add_subcommand("ablate", "evaluate with e2, e3, e4 removed in turn");
  for (auto* sub : {synth, build, walk, train, rec, eval, abl}) add_pipeline_flags(*sub, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }

  try {
    if (*synth) return cmd_synth(flags, synth_spec);
    if (*build) return cmd_build_graph(flags);
    if (*walk) return cmd_walk(flags);
    if (*train) return cmd_train(flags, text_export);
    if (*rec) return cmd_recommend(flags);
    if (*eval) return cmd_evaluate(flags);
    if (*abl) return cmd_ablate(flags);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}
