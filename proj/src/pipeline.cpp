#include "hyperrec/pipeline.hpp"

#include <sstream>

#include "hyperrec/error.hpp"

namespace hyperrec {

Dataset prepare_dataset(InteractionTable interactions, Catalog catalog, TagTable tags, std::size_t top_k) {
  return Dataset{filter_top_k_per_user(interactions, top_k), std::move(catalog), std::move(tags)};
}

Dataset load_dataset(const PipelineConfig& config) {
  config.require_dataset();
  return prepare_dataset(parse_interactions(config.data.interactions), parse_catalog(config.data.catalog),
                         parse_tags(config.data.tags), config.top_k);
}

FoldData prepare_fold(const Dataset& data, const PipelineConfig& config, std::size_t fold) {
  SplitSpec spec = config.split;
  spec.fold_index = fold;
  FoldData out;
  out.split = split(data.interactions, spec);
  out.graph = build_hypergraph(out.split.train, data.catalog, data.tags, config.edges);
  return out;
}

std::vector<std::string> test_users(const SplitResult& split) {
  std::vector<std::string> users;
  for (auto rows : split.test.by_user()) users.push_back(rows.front().user);
  return users;
}

std::vector<RecommendationList> recommend_all(const FoldData& fold, const EmbeddingTable& embeddings,
                                              const PipelineConfig& config, std::span<const std::string> users) {
  const auto exclusions = training_exclusions(fold.split.train);
  if (config.method == Method::kPopularity) {
    return popularity_baseline(fold.split.train, exclusions, users, config.max_n());
  }
  RankerConfig ranker = config.ranker;
  ranker.n = config.max_n();
  static const std::set<std::string, std::less<>> kNone;
  std::vector<RecommendationList> lists;
  lists.reserve(users.size());
  for (const auto& user : users) {
    const auto it = exclusions.find(user);
    lists.push_back(recommend(user, fold.graph, embeddings, it == exclusions.end() ? kNone : it->second, ranker));
  }
  return lists;
}

FoldOutcome run_fold(const Dataset& data, const PipelineConfig& config, std::size_t fold) {
  const FoldData prepared = prepare_fold(data, config, fold);
  const auto users = test_users(prepared.split);

  EmbeddingTable embeddings;
  if (config.method == Method::kHypergraph) {
    const WalkCorpus corpus = generate_walks(prepared.graph, config.walk);
    embeddings = train_skipgram(corpus, prepared.graph.vertex_count(), config.embedding).table;
    embeddings.drop_context();
  }
  const auto lists = recommend_all(prepared, embeddings, config, users);

  FoldOutcome outcome;
  for (const auto& list : lists) {
    UserOutcome u;
    u.user = list.user;
    u.recommended = list.tracks();
    for (const auto& r : prepared.split.test.user_rows(list.user)) u.relevant.insert(r.track);
    outcome.users.push_back(std::move(u));
  }
  return outcome;
}

MetricsReport evaluate(const Dataset& data, const PipelineConfig& config) {
  config.validate();
  const TagProfile tags(data.tags);
  MetricsReport report = evaluate_folds([&](std::size_t fold) { return run_fold(data, config, fold); },
                                        config.split.folds, config.ns, tags);
  for (const auto& [k, v] : config.describe()) report.metadata[k] = v;
  return report;
}

std::vector<AblationRow> ablate(const Dataset& data, const PipelineConfig& config) {
  std::vector<AblationRow> rows;
  for (auto kind : {EdgeKind::kTagTrack, EdgeKind::kAlbumTrack, EdgeKind::kArtistTrack}) {
    PipelineConfig variant = config;
    variant.method = Method::kHypergraph;
    variant.edges = config.edges.without(kind);
    rows.push_back({"-" + std::string(to_string(kind)), evaluate(data, variant)});
  }
  return rows;
}

}  // namespace hyperrec
