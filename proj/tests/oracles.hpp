#pragma once

// Independent reference implementations used by unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <span>

#include "hyperrec/dataset.hpp"
#include "hyperrec/embedding.hpp"

namespace testing {

using hyperrec::TagCount;
using hyperrec::TagTable;
using Vec = std::vector<double>;


struct Triple {
  std::string track;
  std::string tag;
  std::size_t j;
  double q;
};

// Materialises every (tr, ta, j) triple of the list, then applies the
// aggregate formula to the triples alone.
inline double aggr_div_oracle(const std::vector<std::string>& list, const TagTable& tags, std::size_t n) {
  std::map<std::string, std::map<std::string, std::uint64_t>> counts;
  for (const auto& r : tags.rows()) counts[r.track][r.tag] += r.count;

  std::vector<Triple> triples;
  const std::size_t len = std::min(n, list.size());
  for (std::size_t pos = 0; pos < len; ++pos) {
    const auto it = counts.find(list[pos]);
    if (it == counts.end()) continue;
    double total = 0.0;
    for (const auto& [tag, c] : it->second) total += static_cast<double>(c);
    for (const auto& [tag, c] : it->second) {
      std::size_t j = 0;
      for (std::size_t k = 0; k <= pos; ++k) {
        const auto other = counts.find(list[k]);
        if (other != counts.end() && other->second.count(tag)) ++j;
      }
      triples.push_back({list[pos], tag, j, static_cast<double>(c) / total});
    }
  }
  std::map<std::string, double> p;
  std::map<std::string, double> d;
  for (const auto& t : triples) {
    p[t.tag] += t.q / std::log2(1.0 + static_cast<double>(t.j));
    d[t.tag] += 1.0;
  }
  double num = 0.0;
  double den = 0.0;
  for (const auto& [tag, dv] : d) {
    num += p[tag] * dv;
    den += dv;
  }
  return den == 0.0 ? 0.0 : num / den;
}

struct RandomCase {
  std::vector<std::string> list;
  TagTable tags;
};

inline RandomCase random_aggr_case(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> len(0, 10), ntags(1, 8), per(0, 4), count(1, 9), pick(0, 1 << 30);
  RandomCase c;
  const int tracks = len(rng);
  const int tag_space = ntags(rng);
  std::vector<TagCount> rows;
  for (int t = 0; t < tracks; ++t) {
    const std::string id = "t" + std::to_string(t);
    c.list.push_back(id);
    const int k = per(rng);
    for (int i = 0; i < k; ++i) {
      rows.push_back({id, "g" + std::to_string(pick(rng) % tag_space), static_cast<std::uint64_t>(count(rng))});
    }
  }
  c.tags = TagTable::from_rows(rows);
  return c;
}

// Reference loss in the most direct form, independent of the library.
inline double direct_loss(const Vec& u, const Vec& v, const std::vector<Vec>& negs) {
  auto dot = [](const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  };
  auto softplus = [](double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); };
  double loss = softplus(-dot(u, v));
  for (const auto& n : negs) loss += softplus(dot(u, n));
  return loss;
}

inline hyperrec::PairLoss call_pair_loss(const Vec& u, const Vec& v, const std::vector<Vec>& negs) {
  std::vector<std::span<const double>> spans(negs.begin(), negs.end());
  return hyperrec::sgns_pair_loss(u, v, spans);
}

inline double norm_rel_error(const Vec& analytic, const Vec& numeric) {
  double diff = 0.0;
  double a = 0.0;
  double n = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
    a += analytic[i] * analytic[i];
    n += numeric[i] * numeric[i];
  }
  const double scale = std::max(std::sqrt(a), std::sqrt(n));
  return scale == 0.0 ? 0.0 : std::sqrt(diff) / scale;
}

}  // namespace testing
