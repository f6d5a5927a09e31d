#pragma once

// Accuracy (Recall, Hit Ratio, MAP, NDCG) and tag-diversity (AGGR-DIV)
// metrics, and the fold-averaging evaluation harness.

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hyperrec/dataset.hpp"

namespace hyperrec {

using RelevantSet = std::set<std::string, std::less<>>;

double recall_at_n(std::span<const std::string> recommended, const RelevantSet& relevant, std::size_t n);
double hit_ratio_at_n(std::span<const std::string> recommended, const RelevantSet& relevant, std::size_t n);
/// Truncated MAP normalised by min(|relevant|, n).
double map_at_n(std::span<const std::string> recommended, const RelevantSet& relevant, std::size_t n);
/// Binary gains, log2(position + 1) discount.
double ndcg_at_n(std::span<const std::string> recommended, const RelevantSet& relevant, std::size_t n);

/// Per-track tag shares q(tr, ta) = c(tr, ta) / sum_i c(tr, ta_i).
class TagProfile {
 public:
  TagProfile() = default;
  explicit TagProfile(const TagTable& tags);

  /// Empty span for untagged tracks. Entries are sorted by tag.
  std::span<const std::pair<std::string, double>> shares(std::string_view track) const;

 private:
  std::unordered_map<std::string, std::vector<std::pair<std::string, double>>> shares_;
};

/// Aggregate tag diversity of the top-n list:
///   sum_ta p(ta) D(ta) / sum_ta D(ta),  p(ta) = sum_tr q(tr, ta) / log2(1 + j)
/// where j counts list tracks carrying ta up to and including tr, and
/// D(ta) is the number of list tracks carrying ta. 0 when nothing is tagged.
double aggr_div_at_n(std::span<const std::string> list, const TagProfile& tags, std::size_t n);

enum class Metric { kRecall = 0, kHitRatio, kMap, kNdcg, kAggrDiv };
inline constexpr std::size_t kMetricCount = 5;
inline constexpr std::array<Metric, kMetricCount> kAllMetrics = {Metric::kRecall, Metric::kHitRatio, Metric::kMap,
                                                                  Metric::kNdcg, Metric::kAggrDiv};
std::string_view to_string(Metric m);

double user_metric(Metric m, std::span<const std::string> recommended, const RelevantSet& relevant,
                   const TagProfile& tags, std::size_t n);

struct UserOutcome {
  std::string user;
  std::vector<std::string> recommended;  // ranked, at least max(n) long when possible
  RelevantSet relevant;                   // held-out tracks
};

struct FoldOutcome {
  std::vector<UserOutcome> users;
};

struct MetricsReport {
  std::vector<std::size_t> ns;
  std::size_t folds = 0;
  /// values[metric][n index][fold]: mean over users.
  std::array<std::vector<std::vector<double>>, kMetricCount> per_fold;
  /// means[metric][n index]: mean over folds.
  std::array<std::vector<double>, kMetricCount> means;
  std::map<std::string, std::string> metadata;

  std::size_t n_index(std::size_t n) const;
  double fold_value(Metric m, std::size_t n, std::size_t fold) const;
  double mean_value(Metric m, std::size_t n) const;
};

/// Means over users (those with a nonempty relevant set) of every metric
/// at every n: result[metric][n index].
std::array<std::vector<double>, kMetricCount> fold_metrics(const FoldOutcome& fold, const TagProfile& tags,
                                                          std::span<const std::size_t> ns);

/// Runs `run_fold` for fold 0..folds-1 and averages. A failing fold is
/// rethrown with its index in the message.
MetricsReport evaluate_folds(const std::function<FoldOutcome(std::size_t fold)>& run_fold, std::size_t folds,
                             std::span<const std::size_t> ns, const TagProfile& tags);

/// Long format: metric,n,fold,value with fold = index or "mean".
void write_metrics_csv(std::ostream& out, const MetricsReport& report);
void write_metrics_csv(const std::filesystem::path& path, const MetricsReport& report);
void write_metrics_json(std::ostream& out, const MetricsReport& report);
void write_metrics_json(const std::filesystem::path& path, const MetricsReport& report);

}  // namespace hyperrec
