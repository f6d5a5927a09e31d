#include "hyperrec/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>

#include "hyperrec/error.hpp"

namespace hyperrec {

std::string_view to_string(RankMode mode) {
  switch (mode) {
    case RankMode::kRelevanceOnly: return "relevance_only";
    case RankMode::kLiteralDiversity: return "literal_diversity";
    case RankMode::kMmrGreedy: return "mmr_greedy";
  }
  return "?";
}

RankMode parse_rank_mode(std::string_view text) {
  if (text == "relevance_only") return RankMode::kRelevanceOnly;
  if (text == "literal_diversity") return RankMode::kLiteralDiversity;
  if (text == "mmr_greedy") return RankMode::kMmrGreedy;
  throw ValidationError("unknown ranking mode '" + std::string(text) +
                        "' (expected relevance_only, literal_diversity or mmr_greedy)");
}

std::string_view to_string(Similarity sim) { return sim == Similarity::kDot ? "dot" : "cosine"; }

Similarity parse_similarity(std::string_view text) {
  if (text == "dot") return Similarity::kDot;
  if (text == "cosine") return Similarity::kCosine;
  throw ValidationError("unknown similarity '" + std::string(text) + "' (expected dot or cosine)");
}

void RankerConfig::validate() const {
  if (n == 0) throw ValidationError("recommendation list length must be >= 1");
  if (alpha && !(*alpha >= 0.0 && *alpha <= 1.0)) throw ValidationError("alpha must lie in [0, 1]");
}

double RankerConfig::alpha_at(std::size_t position) const { return alpha ? *alpha : adaptive_alpha(position); }

std::vector<std::string> RecommendationList::tracks() const {
  std::vector<std::string> out;
  out.reserve(items.size());
  for (const auto& item : items) out.push_back(item.track);
  return out;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("vector dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace

double cosine(std::span<const double> a, std::span<const double> b) {
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

double relevance(std::span<const double> user, std::span<const double> track, Similarity sim) {
  return sim == Similarity::kDot ? dot(user, track) : cosine(user, track);
}

double diversity_degree(double rel, double alpha) { return alpha * (1.0 - rel); }

double adaptive_alpha(std::size_t position) {
  if (position == 0) throw ValidationError("positions are 1-based");
  return 1.0 - 1.0 / (static_cast<double>(position) + 1.0);
}

std::vector<RankedItem> rank_candidates(std::span<const double> user, std::span<const Candidate> candidates,
                                        const RankerConfig& config) {
  config.validate();
  const std::size_t m = candidates.size();
  const std::size_t n = std::min(config.n, m);
  std::vector<double> rel(m);
  for (std::size_t c = 0; c < m; ++c) rel[c] = relevance(user, candidates[c].vector, config.similarity);

  // Strict order used for every tie: higher relevance, then smaller id.
  auto by_relevance = [&](std::size_t a, std::size_t b) {
    if (rel[a] != rel[b]) return rel[a] > rel[b];
    return candidates[a].track < candidates[b].track;
  };

  std::vector<std::size_t> picked;
  picked.reserve(n);
  switch (config.mode) {
    case RankMode::kRelevanceOnly: {
      std::vector<std::size_t> order(m);
      std::iota(order.begin(), order.end(), 0);
      std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(), by_relevance);
      picked.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n));
      break;
    }
    case RankMode::kLiteralDiversity: {
      // Rescore position by position with d = alpha_i (1 - rel) and take
      // the smallest; equal d falls back to relevance, then id.
      std::vector<bool> used(m, false);
      for (std::size_t pos = 1; pos <= n; ++pos) {
        const double a = config.alpha_at(pos);
        std::optional<std::size_t> best;
        double best_d = 0.0;
        for (std::size_t c = 0; c < m; ++c) {
          if (used[c]) continue;
          const double d = diversity_degree(rel[c], a);
          if (!best || d < best_d || (d == best_d && by_relevance(c, *best))) {
            best = c;
            best_d = d;
          }
        }
        used[*best] = true;
        picked.push_back(*best);
      }
      break;
    }
    case RankMode::kMmrGreedy: {
      std::vector<std::vector<double>> unit(m);
      for (std::size_t c = 0; c < m; ++c) {
        const auto v = candidates[c].vector;
        const double len = norm(v);
        unit[c].assign(v.begin(), v.end());
        if (len > 0.0) for (double& x : unit[c]) x /= len;
      }
      std::vector<double> max_sim(m, -std::numeric_limits<double>::infinity());
      std::vector<bool> used(m, false);
      for (std::size_t pos = 1; pos <= n; ++pos) {
        const double a = config.alpha_at(pos);
        std::optional<std::size_t> best;
        double best_score = 0.0;
        for (std::size_t c = 0; c < m; ++c) {
          if (used[c]) continue;
          const double score = pos == 1 ? rel[c] : (1.0 - a) * rel[c] - a * max_sim[c];
          if (!best || score > best_score ||
              (score == best_score && candidates[c].track < candidates[*best].track)) {
            best = c;
            best_score = score;
          }
        }
        used[*best] = true;
        picked.push_back(*best);
        for (std::size_t c = 0; c < m; ++c) {
          if (used[c]) continue;
          max_sim[c] = std::max(max_sim[c], dot(unit[c], unit[*best]));
        }
      }
      break;
    }
  }

  std::vector<RankedItem> out;
  out.reserve(picked.size());
  for (std::size_t i = 0; i < picked.size(); ++i) {
    out.push_back({std::string(candidates[picked[i]].track), rel[picked[i]], i + 1});
  }
  return out;
}

RecommendationList recommend(std::string_view user, const Hypergraph& g, const EmbeddingTable& embeddings,
                             const std::set<std::string, std::less<>>& exclusions, const RankerConfig& config) {
  if (embeddings.rows() != g.vertex_count()) {
    throw ValidationError("embedding table has " + std::to_string(embeddings.rows()) + " rows for a graph of " +
                          std::to_string(g.vertex_count()) + " vertices");
  }
  const auto u = g.find(VertexKind::kUser, user);
  if (!u) throw LookupError("cold user '" + std::string(user) + "' has no embedding");

  std::vector<Candidate> candidates;
  const auto [begin, end] = g.kind_range(VertexKind::kTrack);
  for (VertexIndex t = begin; t < end; ++t) {
    const auto& key = g.vertex(t).key;
    if (exclusions.count(key)) continue;
    candidates.push_back({key, embeddings.row(t)});
  }
  if (candidates.empty()) throw ValidationError("no candidate tracks left for user '" + std::string(user) + "'");

  RecommendationList list{std::string(user), rank_candidates(embeddings.row(*u), candidates, config), config.mode};
  return list;
}

ExclusionMap training_exclusions(const InteractionTable& train) {
  ExclusionMap out;
  for (const auto& r : train.rows()) out[r.user].insert(r.track);
  return out;
}

std::vector<RecommendationList> popularity_baseline(const InteractionTable& train, const ExclusionMap& exclusions,
                                                    std::span<const std::string> users, std::size_t n) {
  if (train.empty()) throw ValidationError("popularity baseline needs training data");
  if (n == 0) throw ValidationError("recommendation list length must be >= 1");
  std::vector<std::pair<std::string, std::uint64_t>> ranked;
  for (const auto& [track, plays] : train.track_totals()) ranked.emplace_back(track, plays);
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

  static const std::set<std::string, std::less<>> kNone;
  std::vector<RecommendationList> lists;
  lists.reserve(users.size());
  for (const auto& user : users) {
    const auto it = exclusions.find(user);
    const auto& excluded = it == exclusions.end() ? kNone : it->second;
    RecommendationList list{user, {}, RankMode::kRelevanceOnly};
    for (const auto& [track, plays] : ranked) {
      if (list.items.size() == n) break;
      if (excluded.count(track)) continue;
      list.items.push_back({track, static_cast<double>(plays), list.items.size() + 1});
    }
    lists.push_back(std::move(list));
  }
  return lists;
}

void write_recommendations(std::ostream& out, std::span<const RecommendationList> lists) {
  out << "user\trank\ttrack\tscore\n";
  out.precision(17);
  for (const auto& list : lists) {
    for (const auto& item : list.items) {
      out << list.user << '\t' << item.position << '\t' << item.track << '\t' << item.relevance << '\n';
    }
  }
}

void write_recommendations(const std::filesystem::path& path, std::span<const RecommendationList> lists) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_recommendations(out, lists);
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace hyperrec
