#include "hyperrec/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "hyperrec/error.hpp"

namespace hyperrec {

namespace {

void require_n(std::size_t n) {
  if (n == 0) throw ValidationError("metric cut-off n must be >= 1");
}

std::span<const std::string> top(std::span<const std::string> list, std::size_t n) {
  return list.first(std::min(n, list.size()));
}

std::size_t hits(std::span<const std::string> list, const RelevantSet& relevant) {
  return static_cast<std::size_t>(
      std::count_if(list.begin(), list.end(), [&](const std::string& t) { return relevant.count(t) != 0; }));
}

std::string number(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

}  // namespace

double recall_at_n(std::span<const std::string> recommended, const RelevantSet& relevant, std::size_t n) {
  require_n(n);
  if (relevant.empty()) return 0.0;
  return static_cast<double>(hits(top(recommended, n), relevant)) / static_cast<double>(relevant.size());
}

double hit_ratio_at_n(std::span<const std::string> recommended, const RelevantSet& relevant, std::size_t n) {
  require_n(n);
  return hits(top(recommended, n), relevant) > 0 ? 1.0 : 0.0;
}

double map_at_n(std::span<const std::string> recommended, const RelevantSet& relevant, std::size_t n) {
  require_n(n);
  if (relevant.empty()) return 0.0;
  const auto list = top(recommended, n);
  double sum = 0.0;
  std::size_t found = 0;
  for (std::size_t p = 0; p < list.size(); ++p) {
    if (!relevant.count(list[p])) continue;
    ++found;
    sum += static_cast<double>(found) / static_cast<double>(p + 1);
  }
  return sum / static_cast<double>(std::min(relevant.size(), n));
}

double ndcg_at_n(std::span<const std::string> recommended, const RelevantSet& relevant, std::size_t n) {
  require_n(n);
  if (relevant.empty()) return 0.0;
  const auto list = top(recommended, n);
  double dcg = 0.0;
  for (std::size_t p = 0; p < list.size(); ++p) {
    if (relevant.count(list[p])) dcg += 1.0 / std::log2(static_cast<double>(p) + 2.0);
  }
  double ideal = 0.0;
  const std::size_t k = std::min(relevant.size(), n);
  for (std::size_t p = 0; p < k; ++p) ideal += 1.0 / std::log2(static_cast<double>(p) + 2.0);
  return dcg / ideal;
}

TagProfile::TagProfile(const TagTable& tags) {
  for (auto rows : tags.by_track()) {
    double total = 0.0;
    for (const auto& r : rows) total += static_cast<double>(r.count);
    auto& out = shares_[rows.front().track];
    for (const auto& r : rows) out.emplace_back(r.tag, static_cast<double>(r.count) / total);
  }
}

std::span<const std::pair<std::string, double>> TagProfile::shares(std::string_view track) const {
  const auto it = shares_.find(std::string(track));
  if (it == shares_.end()) return {};
  return it->second;
}

double aggr_div_at_n(std::span<const std::string> list, const TagProfile& tags, std::size_t n) {
  require_n(n);
  struct Acc {
    double p = 0.0;
    std::size_t occurrences = 0;
  };
  std::unordered_map<std::string_view, Acc> acc;
  for (const auto& track : top(list, n)) {
    for (const auto& [tag, q] : tags.shares(track)) {
      auto& a = acc[tag];
      ++a.occurrences;  // j for this track
      a.p += q / std::log2(1.0 + static_cast<double>(a.occurrences));
    }
  }
  double num = 0.0;
  double den = 0.0;
  for (const auto& [_, a] : acc) {
    num += a.p * static_cast<double>(a.occurrences);
    den += static_cast<double>(a.occurrences);
  }
  return den > 0.0 ? num / den : 0.0;
}

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::kRecall: return "recall";
    case Metric::kHitRatio: return "hit_ratio";
    case Metric::kMap: return "map";
    case Metric::kNdcg: return "ndcg";
    case Metric::kAggrDiv: return "aggr_div";
  }
  return "?";
}

double user_metric(Metric m, std::span<const std::string> recommended, const RelevantSet& relevant,
                   const TagProfile& tags, std::size_t n) {
  switch (m) {
    case Metric::kRecall: return recall_at_n(recommended, relevant, n);
    case Metric::kHitRatio: return hit_ratio_at_n(recommended, relevant, n);
    case Metric::kMap: return map_at_n(recommended, relevant, n);
    case Metric::kNdcg: return ndcg_at_n(recommended, relevant, n);
    case Metric::kAggrDiv: return aggr_div_at_n(recommended, tags, n);
  }
  throw Error(ErrorKind::kInternal, "unknown metric");
}

std::size_t MetricsReport::n_index(std::size_t n) const {
  const auto it = std::find(ns.begin(), ns.end(), n);
  if (it == ns.end()) throw LookupError("report has no values for n=" + std::to_string(n));
  return static_cast<std::size_t>(it - ns.begin());
}

double MetricsReport::fold_value(Metric m, std::size_t n, std::size_t fold) const {
  return per_fold[static_cast<std::size_t>(m)].at(n_index(n)).at(fold);
}

double MetricsReport::mean_value(Metric m, std::size_t n) const {
  return means[static_cast<std::size_t>(m)].at(n_index(n));
}

std::array<std::vector<double>, kMetricCount> fold_metrics(const FoldOutcome& fold, const TagProfile& tags,
                                                          std::span<const std::size_t> ns) {
  std::array<std::vector<double>, kMetricCount> out;
  for (auto& v : out) v.assign(ns.size(), 0.0);
  std::size_t users = 0;
  for (const auto& u : fold.users) {
    if (u.relevant.empty()) continue;
    ++users;
    for (Metric m : kAllMetrics) {
      for (std::size_t i = 0; i < ns.size(); ++i) {
        out[static_cast<std::size_t>(m)][i] += user_metric(m, u.recommended, u.relevant, tags, ns[i]);
      }
    }
  }
  if (users == 0) throw ValidationError("fold has no users with held-out tracks");
  for (auto& v : out) {
    for (double& x : v) x /= static_cast<double>(users);
  }
  return out;
}

MetricsReport evaluate_folds(const std::function<FoldOutcome(std::size_t fold)>& run_fold, std::size_t folds,
                             std::span<const std::size_t> ns, const TagProfile& tags) {
  if (folds == 0) throw ValidationError("evaluation needs at least one fold");
  if (ns.empty()) throw ValidationError("evaluation needs at least one cut-off n");
  for (std::size_t n : ns) require_n(n);

  MetricsReport report;
  report.ns.assign(ns.begin(), ns.end());
  report.folds = folds;
  for (auto& m : report.per_fold) m.assign(ns.size(), std::vector<double>(folds, 0.0));
  for (std::size_t f = 0; f < folds; ++f) {
    std::array<std::vector<double>, kMetricCount> values;
    try {
      values = fold_metrics(run_fold(f), tags, ns);
    } catch (const Error& e) {
      throw Error(e.kind(), "fold " + std::to_string(f) + ": " + e.what());
    } catch (const std::exception& e) {
      throw Error(ErrorKind::kInternal, "fold " + std::to_string(f) + ": " + e.what());
    }
    for (std::size_t m = 0; m < kMetricCount; ++m) {
      for (std::size_t i = 0; i < ns.size(); ++i) report.per_fold[m][i][f] = values[m][i];
    }
  }
  for (std::size_t m = 0; m < kMetricCount; ++m) {
    report.means[m].resize(ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i) {
      double sum = 0.0;
      for (double x : report.per_fold[m][i]) sum += x;
      report.means[m][i] = sum / static_cast<double>(folds);
    }
  }
  return report;
}

void write_metrics_csv(std::ostream& out, const MetricsReport& report) {
  out << "metric,n,fold,value\n";
  for (Metric m : kAllMetrics) {
    const auto mi = static_cast<std::size_t>(m);
    for (std::size_t i = 0; i < report.ns.size(); ++i) {
      for (std::size_t f = 0; f < report.folds; ++f) {
        out << to_string(m) << ',' << report.ns[i] << ',' << f << ',' << number(report.per_fold[mi][i][f]) << '\n';
      }
      out << to_string(m) << ',' << report.ns[i] << ",mean," << number(report.means[mi][i]) << '\n';
    }
  }
}

void write_metrics_json(std::ostream& out, const MetricsReport& report) {
  nlohmann::ordered_json j;
  j["folds"] = report.folds;
  j["n"] = report.ns;
  j["metadata"] = report.metadata;
  for (Metric m : kAllMetrics) {
    const auto mi = static_cast<std::size_t>(m);
    auto& entry = j["metrics"][std::string(to_string(m))];
    for (std::size_t i = 0; i < report.ns.size(); ++i) {
      entry[std::to_string(report.ns[i])] = {{"folds", report.per_fold[mi][i]}, {"mean", report.means[mi][i]}};
    }
  }
  out << j.dump(2) << '\n';
}

namespace {

template <typename Writer>
void write_file(const std::filesystem::path& path, const MetricsReport& report, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  writer(out, report);
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

void write_metrics_csv(const std::filesystem::path& path, const MetricsReport& report) {
  write_file(path, report, [](std::ostream& o, const MetricsReport& r) { write_metrics_csv(o, r); });
}

void write_metrics_json(const std::filesystem::path& path, const MetricsReport& report) {
  write_file(path, report, [](std::ostream& o, const MetricsReport& r) { write_metrics_json(o, r); });
}

}  // namespace hyperrec
