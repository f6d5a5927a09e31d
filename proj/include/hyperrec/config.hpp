#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "hyperrec/dataset.hpp"
#include "hyperrec/embedding.hpp"
#include "hyperrec/hypergraph.hpp"
#include "hyperrec/ranker.hpp"
#include "hyperrec/walker.hpp"

namespace hyperrec {

enum class Method { kHypergraph, kPopularity };

std::string_view to_string(Method m);
Method parse_method(std::string_view text);

struct DatasetPaths {
  std::filesystem::path interactions;
  std::filesystem::path catalog;
  std::filesystem::path tags;
};

/// Every knob of a pipeline run. Defaults: top-200 filter, 90/10 split
/// over 10 folds, r=5 walks of k=200 vertices, s=50, w=5, lists of
/// 10..100 ranked with mmr_greedy and adaptive alpha, all four edge kinds.
struct PipelineConfig {
  DatasetPaths data;
  std::size_t top_k = 200;
  SplitSpec split;
  WalkConfig walk;
  EmbeddingConfig embedding;
  RankerConfig ranker;
  std::vector<std::size_t> ns = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  EdgeKindSet edges = EdgeKindSet::all();
  Method method = Method::kHypergraph;
  std::size_t threads = 1;
  std::filesystem::path out = ".";

  PipelineConfig();

  /// Applies one dotted key. Throws ValidationError naming the key when it
  /// is unknown or its value does not parse.
  void set(std::string_view key, std::string_view value);
  /// Flat "key = value" lines; '#' starts a comment.
  void load_file(const std::filesystem::path& path);
  void load(std::istream& in, const std::string& source);

  /// Throws ValidationError naming the first required key that is unset.
  void require_dataset() const;
  void validate() const;
  std::size_t max_n() const;

  /// Canonical key=value dump, used as report metadata.
  std::vector<std::pair<std::string, std::string>> describe() const;
};

std::vector<std::size_t> parse_size_list(std::string_view text);

}  // namespace hyperrec
