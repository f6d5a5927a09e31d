#pragma once

// End-to-end runs: load -> filter -> split -> graph -> walks -> embeddings
// -> ranked lists -> metrics.

#include <string>
#include <vector>

#include "hyperrec/config.hpp"
#include "hyperrec/dataset.hpp"
#include "hyperrec/embedding.hpp"
#include "hyperrec/hypergraph.hpp"
#include "hyperrec/metrics.hpp"
#include "hyperrec/ranker.hpp"
#include "hyperrec/walker.hpp"

namespace hyperrec {

struct Dataset {
  InteractionTable interactions;  // after the per-user top-k filter
  Catalog catalog;
  TagTable tags;
};

/// Reads the three files named in the config and applies the top-k filter.
Dataset load_dataset(const PipelineConfig& config);
Dataset prepare_dataset(InteractionTable interactions, Catalog catalog, TagTable tags, std::size_t top_k);

struct FoldData {
  SplitResult split;
  Hypergraph graph;
};

FoldData prepare_fold(const Dataset& data, const PipelineConfig& config, std::size_t fold);

/// Users with held-out tracks, ascending.
std::vector<std::string> test_users(const SplitResult& split);

/// Ranked lists of length config.max_n() for `users`.
std::vector<RecommendationList> recommend_all(const FoldData& fold, const EmbeddingTable& embeddings,
                                              const PipelineConfig& config, std::span<const std::string> users);

/// Full run of one fold with the configured method.
FoldOutcome run_fold(const Dataset& data, const PipelineConfig& config, std::size_t fold);

MetricsReport evaluate(const Dataset& data, const PipelineConfig& config);

struct AblationRow {
  std::string label;  // "-e2", "-e3", "-e4"
  MetricsReport report;
};

/// Evaluates three variants, each with one of e2/e3/e4 removed.
std::vector<AblationRow> ablate(const Dataset& data, const PipelineConfig& config);

}  // namespace hyperrec
