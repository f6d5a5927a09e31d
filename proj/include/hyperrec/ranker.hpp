#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hyperrec/dataset.hpp"
#include "hyperrec/embedding.hpp"
#include "hyperrec/hypergraph.hpp"

namespace hyperrec {

enum class RankMode { kRelevanceOnly, kLiteralDiversity, kMmrGreedy };
enum class Similarity { kDot, kCosine };

std::string_view to_string(RankMode mode);
RankMode parse_rank_mode(std::string_view text);
std::string_view to_string(Similarity sim);
Similarity parse_similarity(std::string_view text);

struct RankerConfig {
  std::size_t n = 10;
  RankMode mode = RankMode::kMmrGreedy;
  /// Fixed diversity weight; nullopt selects alpha_i = 1 - 1/(i+1).
  std::optional<double> alpha;
  Similarity similarity = Similarity::kDot;

  void validate() const;
  double alpha_at(std::size_t position) const;
};

struct RankedItem {
  std::string track;
  double relevance = 0.0;
  std::size_t position = 0;  // 1-based
};

struct RecommendationList {
  std::string user;
  std::vector<RankedItem> items;
  RankMode mode = RankMode::kRelevanceOnly;

  std::vector<std::string> tracks() const;
};

/// Dot product, or dot of unit vectors under cosine; a zero vector under
/// cosine scores 0.
double relevance(std::span<const double> user, std::span<const double> track, Similarity sim = Similarity::kDot);

/// alpha * (1 - rel).
double diversity_degree(double rel, double alpha);

/// 1 - 1/(i + 1) for 1-based position i.
double adaptive_alpha(std::size_t position);

double cosine(std::span<const double> a, std::span<const double> b);

struct Candidate {
  std::string_view track;
  std::span<const double> vector;
};

/// Ranks `candidates` for one user vector. Ties go to the smaller track id.
///  - relevance_only: descending relevance.
///  - literal_diversity: at each position the smallest alpha_i (1 - rel).
///  - mmr_greedy: position i maximises (1 - a_i) rel - a_i max_s cos(tr, s)
///    over already selected s; position 1 uses rel alone.
std::vector<RankedItem> rank_candidates(std::span<const double> user, std::span<const Candidate> candidates,
                                        const RankerConfig& config);

/// Candidates are every embedded track vertex of `g` not in `exclusions`.
/// Throws LookupError for a user without a vertex (cold user).
RecommendationList recommend(std::string_view user, const Hypergraph& g, const EmbeddingTable& embeddings,
                             const std::set<std::string, std::less<>>& exclusions, const RankerConfig& config);

using ExclusionMap = std::map<std::string, std::set<std::string, std::less<>>, std::less<>>;

/// Per-user training tracks.
ExclusionMap training_exclusions(const InteractionTable& train);

/// Global top tracks by summed training plays (ties by track id), with
/// each user's exclusions removed, truncated to n. One list per user in
/// `users`.
std::vector<RecommendationList> popularity_baseline(const InteractionTable& train, const ExclusionMap& exclusions,
                                                    std::span<const std::string> users, std::size_t n);

/// recommendations.tsv rows: user, rank, track, score.
void write_recommendations(std::ostream& out, std::span<const RecommendationList> lists);
void write_recommendations(const std::filesystem::path& path, std::span<const RecommendationList> lists);

}  // namespace hyperrec
