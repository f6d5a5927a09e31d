#include "hyperrec/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <tuple>

#include "hyperrec/error.hpp"
#include "hyperrec/random.hpp"

namespace hyperrec {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::optional<std::int64_t> to_int(std::string_view s) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

template <typename F>
void for_each_line(std::istream& in, F&& f) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    f(std::string_view(line), number);
  }
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

// Shared reader for the two "key<TAB>key<TAB>count" formats. The first
// line is a header when its third column is not an integer.
template <typename Row, typename Make>
std::vector<Row> parse_counted(std::istream& in, const std::string& source,
                               const char* count_name, Make&& make) {
  std::vector<Row> rows;
  bool first = true;
  for_each_line(in, [&](std::string_view line, std::size_t number) {
    const auto fields = split_tabs(line);
    if (fields.size() != 3) {
      throw ParseError(source, number,
                       "expected 3 tab-separated fields, got " + std::to_string(fields.size()));
    }
    const auto count = to_int(fields[2]);
    const bool header = first && !count;
    first = false;
    if (header) return;
    if (!count) throw ParseError(source, number, std::string("non-integer ") + count_name);
    if (fields[0].empty() || fields[1].empty()) {
      throw ParseError(source, number, "empty key");
    }
    if (*count <= 0) {
      throw ValidationError(source + ":" + std::to_string(number) + ": " + count_name +
                            " must be >= 1, got " + std::to_string(*count));
    }
    rows.push_back(make(fields[0], fields[1], static_cast<std::uint64_t>(*count)));
  });
  return rows;
}

template <typename Row, typename Key>
std::vector<std::span<const Row>> group_by(std::span<const Row> rows, Key key) {
  std::vector<std::span<const Row>> groups;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= rows.size(); ++i) {
    if (i == rows.size() || key(rows[i]) != key(rows[begin])) {
      groups.push_back(rows.subspan(begin, i - begin));
      begin = i;
    }
  }
  return groups;
}

}  // namespace

// ---------------------------------------------------------------------------

InteractionTable InteractionTable::from_rows(std::vector<Interaction> rows) {
  for (const auto& r : rows) {
    if (r.plays == 0) {
      throw ValidationError("play count must be >= 1 for (" + r.user + ", " + r.track + ")");
    }
  }
  std::sort(rows.begin(), rows.end(), [](const Interaction& a, const Interaction& b) {
    return std::tie(a.user, a.track) < std::tie(b.user, b.track);
  });
  InteractionTable table;
  for (auto& r : rows) {
    if (!table.rows_.empty() && table.rows_.back().user == r.user &&
        table.rows_.back().track == r.track) {
      table.rows_.back().plays += r.plays;
    } else {
      table.rows_.push_back(std::move(r));
    }
  }
  return table;
}

std::vector<std::span<const Interaction>> InteractionTable::by_user() const {
  return group_by(rows(), [](const Interaction& r) -> const std::string& { return r.user; });
}

std::span<const Interaction> InteractionTable::user_rows(std::string_view user) const {
  const auto lo = std::lower_bound(rows_.begin(), rows_.end(), user,
                                   [](const Interaction& r, std::string_view u) { return r.user < u; });
  auto hi = lo;
  while (hi != rows_.end() && hi->user == user) ++hi;
  return {lo, hi};
}

std::size_t InteractionTable::user_count() const { return by_user().size(); }

std::size_t InteractionTable::track_count() const { return track_totals().size(); }

std::map<std::string, std::uint64_t, std::less<>> InteractionTable::track_totals() const {
  std::map<std::string, std::uint64_t, std::less<>> totals;
  for (const auto& r : rows_) totals[r.track] += r.plays;
  return totals;
}

void Catalog::add(std::string track, TrackInfo info) {
  if (track.empty()) throw ValidationError("catalog entry with empty track id");
  if (info.artist.empty()) throw ValidationError("track " + track + " has no artist");
  if (info.album && info.album->empty()) info.album.reset();
  const auto [it, inserted] = tracks_.try_emplace(std::move(track), info);
  if (!inserted && !(it->second == info)) {
    throw ValidationError("conflicting catalog entries for track " + it->first);
  }
}

const TrackInfo* Catalog::find(std::string_view track) const {
  const auto it = tracks_.find(track);
  return it == tracks_.end() ? nullptr : &it->second;
}

TagTable TagTable::from_rows(std::vector<TagCount> rows) {
  for (const auto& r : rows) {
    if (r.count == 0) throw ValidationError("tag count must be >= 1 for (" + r.track + ", " + r.tag + ")");
  }
  std::sort(rows.begin(), rows.end(), [](const TagCount& a, const TagCount& b) {
    return std::tie(a.track, a.tag) < std::tie(b.track, b.tag);
  });
  TagTable table;
  for (auto& r : rows) {
    if (!table.rows_.empty() && table.rows_.back().track == r.track && table.rows_.back().tag == r.tag) {
      table.rows_.back().count += r.count;
    } else {
      table.rows_.push_back(std::move(r));
    }
  }
  return table;
}

std::vector<std::span<const TagCount>> TagTable::by_track() const {
  return group_by(rows(), [](const TagCount& r) -> const std::string& { return r.track; });
}

// ---------------------------------------------------------------------------

InteractionTable parse_interactions(std::istream& in, const std::string& source) {
  auto rows = parse_counted<Interaction>(in, source, "play_count",
                                         [](std::string_view u, std::string_view t, std::uint64_t c) {
                                           return Interaction{std::string(u), std::string(t), c};
                                         });
  return InteractionTable::from_rows(std::move(rows));
}

InteractionTable parse_interactions(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_interactions(in, path.string());
}

Catalog parse_catalog(std::istream& in, const std::string& source) {
  Catalog catalog;
  bool first = true;
  for_each_line(in, [&](std::string_view line, std::size_t number) {
    const auto fields = split_tabs(line);
    const bool header = first && fields.size() >= 2 && fields[0] == "track" && fields[1] == "artist";
    first = false;
    if (header) return;
    if (fields.size() != 2 && fields.size() != 3) {
      throw ParseError(source, number,
                       "expected track, artist[, album]; got " + std::to_string(fields.size()) + " fields");
    }
    if (fields[0].empty()) throw ParseError(source, number, "empty track id");
    if (fields[1].empty()) throw ParseError(source, number, "track without artist");
    TrackInfo info{std::string(fields[1]), std::nullopt};
    if (fields.size() == 3 && !fields[2].empty()) info.album = std::string(fields[2]);
    try {
      catalog.add(std::string(fields[0]), std::move(info));
    } catch (const ValidationError& e) {
      throw ParseError(source, number, e.what());
    }
  });
  return catalog;
}

Catalog parse_catalog(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_catalog(in, path.string());
}

TagTable parse_tags(std::istream& in, const std::string& source) {
  auto rows = parse_counted<TagCount>(in, source, "tag count",
                                      [](std::string_view t, std::string_view g, std::uint64_t c) {
                                        return TagCount{std::string(t), std::string(g), c};
                                      });
  return TagTable::from_rows(std::move(rows));
}

TagTable parse_tags(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_tags(in, path.string());
}

void write_interactions(std::ostream& out, const InteractionTable& table) {
  out << "user\ttrack\tcount\n";
  for (const auto& r : table.rows()) out << r.user << '\t' << r.track << '\t' << r.plays << '\n';
}

void write_interactions(const std::filesystem::path& path, const InteractionTable& table) {
  auto out = open_out(path);
  write_interactions(out, table);
  finish(out, path);
}

void write_catalog(std::ostream& out, const Catalog& catalog) {
  out << "track\tartist\talbum\n";
  for (const auto& [track, info] : catalog.entries()) {
    out << track << '\t' << info.artist << '\t' << info.album.value_or("") << '\n';
  }
}

void write_catalog(const std::filesystem::path& path, const Catalog& catalog) {
  auto out = open_out(path);
  write_catalog(out, catalog);
  finish(out, path);
}

void write_tags(std::ostream& out, const TagTable& tags) {
  out << "track\ttag\tcount\n";
  for (const auto& r : tags.rows()) out << r.track << '\t' << r.tag << '\t' << r.count << '\n';
}

void write_tags(const std::filesystem::path& path, const TagTable& tags) {
  auto out = open_out(path);
  write_tags(out, tags);
  finish(out, path);
}

// ---------------------------------------------------------------------------

InteractionTable filter_top_k_per_user(const InteractionTable& table, std::size_t k) {
  if (k == 0) throw ValidationError("top-k filter needs k >= 1");
  std::vector<Interaction> kept;
  kept.reserve(table.size());
  for (auto user_rows : table.by_user()) {
    std::vector<const Interaction*> ranked;
    for (const auto& r : user_rows) ranked.push_back(&r);
    std::sort(ranked.begin(), ranked.end(), [](const Interaction* a, const Interaction* b) {
      if (a->plays != b->plays) return a->plays > b->plays;
      return a->track < b->track;
    });
    if (ranked.size() > k) ranked.resize(k);
    for (const auto* r : ranked) kept.push_back(*r);
  }
  return InteractionTable::from_rows(std::move(kept));
}

void SplitSpec::validate() const {
  if (!(train_ratio > 0.0 && train_ratio < 1.0)) {
    throw ValidationError("split train_ratio must lie in (0, 1)");
  }
  if (folds == 0) throw ValidationError("split folds must be >= 1");
  if (fold_index >= folds) {
    throw ValidationError("fold index " + std::to_string(fold_index) + " out of range for " +
                          std::to_string(folds) + " folds");
  }
}

std::size_t test_size_for(std::size_t n, double train_ratio) {
  if (n < 2) return 0;
  const auto raw = std::lround(static_cast<double>(n) * (1.0 - train_ratio));
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max<long>(raw, 0)), 1, n - 1);
}

SplitResult split(const InteractionTable& table, const SplitSpec& spec) {
  spec.validate();
  SplitResult result;
  std::vector<Interaction> train;
  std::vector<Interaction> test;
  for (auto user_rows : table.by_user()) {
    const std::string& user = user_rows.front().user;
    const std::size_t n = user_rows.size();
    if (n < 2) {
      result.skipped_users.push_back(user);
      train.push_back(user_rows.front());
      continue;
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto eng = make_engine({spec.seed, fnv1a(user)});
    for (std::size_t i = n - 1; i > 0; --i) {
      std::swap(order[i], order[uniform_below(eng, i + 1)]);
    }
    const std::size_t held = test_size_for(n, spec.train_ratio);
    const std::size_t start = (spec.fold_index * held) % n;
    std::vector<bool> in_test(n, false);
    for (std::size_t j = 0; j < held; ++j) in_test[order[(start + j) % n]] = true;
    for (std::size_t i = 0; i < n; ++i) (in_test[i] ? test : train).push_back(user_rows[i]);
  }
  result.train = InteractionTable::from_rows(std::move(train));
  result.test = InteractionTable::from_rows(std::move(test));
  return result;
}

// ---------------------------------------------------------------------------

std::size_t SyntheticSpec::effective_tracks_per_user() const {
  if (tracks_per_user != 0) return tracks_per_user;
  const std::size_t cover = (tracks + users - 1) / std::max<std::size_t>(users, 1);
  return std::max(cover, std::min<std::size_t>(tracks, 20));
}

std::size_t SyntheticSpec::effective_clusters() const {
  if (clusters != 0) return clusters;
  return std::max<std::size_t>(1, std::min({artists, tags, std::size_t{8}}));
}

void SyntheticSpec::validate() const {
  if (users == 0 || tracks == 0 || artists == 0 || albums == 0 || tags == 0) {
    throw ValidationError("synthetic generator needs every entity count >= 1");
  }
  if (tracks < albums) throw ValidationError("synthetic generator needs tracks >= albums");
  if (tracks < artists) throw ValidationError("synthetic generator needs tracks >= artists");
  if (tags > 5 * tracks) throw ValidationError("synthetic generator needs tags <= 5 * tracks");
  const std::size_t per_user = effective_tracks_per_user();
  if (per_user > tracks) throw ValidationError("tracks_per_user exceeds track count");
  if (per_user * users < tracks) {
    throw ValidationError("users * tracks_per_user must cover every track");
  }
  const std::size_t g = effective_clusters();
  if (g > artists || g > tags) throw ValidationError("clusters must not exceed artists or tags");
  if (!(cluster_affinity >= 0.0 && cluster_affinity <= 1.0)) {
    throw ValidationError("cluster_affinity must lie in [0, 1]");
  }
}

namespace {

std::string make_key(char prefix, std::size_t i, std::size_t total) {
  std::string digits = std::to_string(i);
  const std::size_t width = std::to_string(total > 0 ? total - 1 : 0).size();
  return std::string(1, prefix) + std::string(width - digits.size(), '0') + digits;
}

// Heavy-tailed positive count: floor of a Pareto(shape) draw, capped.
std::uint64_t pareto_count(Engine& eng, double shape, std::uint64_t cap) {
  const double u = 1.0 - uniform01(eng);  // (0, 1]
  const double x = std::pow(u, -1.0 / shape);
  return std::min<std::uint64_t>(cap, static_cast<std::uint64_t>(x));
}

std::size_t pick_weighted(Engine& eng, const std::vector<double>& cumulative) {
  const double x = uniform01(eng) * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), x);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

}  // namespace

SyntheticDataset generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  const std::size_t clusters = spec.effective_clusters();
  const std::size_t per_user = spec.effective_tracks_per_user();
  auto eng = make_engine({spec.seed, 0x53594e5448ULL});

  // Albums belong to artists round-robin; artists and tags to clusters.
  std::vector<std::size_t> album_artist(spec.albums);
  for (std::size_t b = 0; b < spec.albums; ++b) album_artist[b] = b % spec.artists;
  auto artist_cluster = [&](std::size_t a) { return a % clusters; };

  // Guarantee every album and every artist gets a track, then ~80% of
  // the remaining tracks land on an album.
  std::vector<std::size_t> track_artist(spec.tracks);
  std::vector<std::optional<std::size_t>> track_album(spec.tracks);
  std::size_t t = 0;
  for (std::size_t b = 0; b < spec.albums; ++b, ++t) {
    track_album[t] = b;
    track_artist[t] = album_artist[b];
  }
  for (std::size_t a = spec.albums; a < spec.artists; ++a, ++t) track_artist[t] = a;
  for (; t < spec.tracks; ++t) {
    if (uniform01(eng) < 0.8) {
      const std::size_t b = uniform_below(eng, spec.albums);
      track_album[t] = b;
      track_artist[t] = album_artist[b];
    } else {
      track_artist[t] = uniform_below(eng, spec.artists);
    }
  }

  std::vector<std::vector<std::size_t>> cluster_tracks(clusters);
  std::vector<std::vector<std::size_t>> cluster_tags(clusters);
  for (std::size_t i = 0; i < spec.tracks; ++i) cluster_tracks[artist_cluster(track_artist[i])].push_back(i);
  for (std::size_t g = 0; g < spec.tags; ++g) cluster_tags[g % clusters].push_back(g);

  // Tags: 1-5 distinct per track, mostly from the track's cluster.
  std::vector<std::vector<std::size_t>> track_tags(spec.tracks);
  std::vector<bool> tag_used(spec.tags, false);
  for (std::size_t i = 0; i < spec.tracks; ++i) {
    const std::size_t want = std::min<std::size_t>(1 + uniform_below(eng, 5), spec.tags);
    const auto& own = cluster_tags[artist_cluster(track_artist[i])];
    std::size_t attempts = 0;
    while (track_tags[i].size() < want && attempts++ < 64) {
      const std::size_t g = uniform01(eng) < spec.cluster_affinity
                                ? own[uniform_below(eng, own.size())]
                                : uniform_below(eng, spec.tags);
      if (std::find(track_tags[i].begin(), track_tags[i].end(), g) == track_tags[i].end()) {
        track_tags[i].push_back(g);
        tag_used[g] = true;
      }
    }
  }
  for (std::size_t g = 0; g < spec.tags; ++g) {
    if (tag_used[g]) continue;
    // Prefer a track of the tag's own cluster that still has room.
    std::optional<std::size_t> host;
    for (std::size_t i : cluster_tracks[g % clusters]) {
      if (track_tags[i].size() < 5) { host = i; break; }
    }
    for (std::size_t i = 0; !host && i < spec.tracks; ++i) {
      if (track_tags[i].size() < 5) host = i;
    }
    // Only reachable when tags is close to 5 * tracks; exceed the cap then.
    track_tags[host.value_or(g % spec.tracks)].push_back(g);
    tag_used[g] = true;
  }

  // Popularity weights: Zipf-like over a random rank order.
  std::vector<std::size_t> rank(spec.tracks);
  std::iota(rank.begin(), rank.end(), 0);
  for (std::size_t i = spec.tracks - 1; i > 0; --i) std::swap(rank[i], rank[uniform_below(eng, i + 1)]);
  std::vector<double> popularity(spec.tracks);
  for (std::size_t i = 0; i < spec.tracks; ++i) popularity[i] = 1.0 / std::pow(rank[i] + 1.0, 0.8);
  std::vector<std::vector<double>> cluster_cumulative(clusters);
  for (std::size_t c = 0; c < clusters; ++c) {
    double acc = 0.0;
    for (std::size_t i : cluster_tracks[c]) cluster_cumulative[c].push_back(acc += popularity[i]);
  }

  // Users: one preferred cluster each. First deal every track to some
  // user so the catalog is fully covered, then fill up to per_user.
  auto user_cluster = [&](std::size_t u) { return u % clusters; };
  std::vector<std::vector<std::size_t>> picks(spec.users);
  std::vector<std::vector<bool>> chosen(spec.users, std::vector<bool>(spec.tracks, false));
  std::vector<std::size_t> deal(spec.tracks);
  std::iota(deal.begin(), deal.end(), 0);
  for (std::size_t i = spec.tracks - 1; i > 0; --i) std::swap(deal[i], deal[uniform_below(eng, i + 1)]);
  for (std::size_t i : deal) {
    const std::size_t c = artist_cluster(track_artist[i]);
    std::optional<std::size_t> best;
    for (int pass = 0; pass < 2 && !best; ++pass) {
      for (std::size_t u = 0; u < spec.users; ++u) {
        if (picks[u].size() >= per_user) continue;
        if (pass == 0 && user_cluster(u) != c) continue;
        if (!best || picks[u].size() < picks[*best].size()) best = u;
      }
    }
    picks[*best].push_back(i);
    chosen[*best][i] = true;
  }
  for (std::size_t u = 0; u < spec.users; ++u) {
    std::size_t attempts = 0;
    while (picks[u].size() < per_user && attempts++ < 50 * per_user) {
      const std::size_t c =
          uniform01(eng) < spec.cluster_affinity ? user_cluster(u) : uniform_below(eng, clusters);
      if (cluster_tracks[c].empty()) continue;
      const std::size_t i = cluster_tracks[c][pick_weighted(eng, cluster_cumulative[c])];
      if (!chosen[u][i]) {
        chosen[u][i] = true;
        picks[u].push_back(i);
      }
    }
    for (std::size_t i = 0; picks[u].size() < per_user && i < spec.tracks; ++i) {
      if (!chosen[u][i]) {
        chosen[u][i] = true;
        picks[u].push_back(i);
      }
    }
  }

  SyntheticDataset data;
  std::vector<Interaction> rows;
  rows.reserve(spec.users * per_user);
  for (std::size_t u = 0; u < spec.users; ++u) {
    for (std::size_t i : picks[u]) {
      // Popular tracks get replayed more; the tail stays near 1.
      const double boost = 1.0 + 4.0 * popularity[i];
      const auto plays = static_cast<std::uint64_t>(
          std::max(1.0, std::floor(boost * static_cast<double>(pareto_count(eng, 1.2, 2000)))));
      rows.push_back({make_key('u', u, spec.users), make_key('t', i, spec.tracks), plays});
    }
  }
  data.interactions = InteractionTable::from_rows(std::move(rows));

  for (std::size_t i = 0; i < spec.tracks; ++i) {
    TrackInfo info{make_key('a', track_artist[i], spec.artists), std::nullopt};
    if (track_album[i]) info.album = make_key('b', *track_album[i], spec.albums);
    data.catalog.add(make_key('t', i, spec.tracks), std::move(info));
  }

  std::vector<TagCount> tag_rows;
  for (std::size_t i = 0; i < spec.tracks; ++i) {
    for (std::size_t g : track_tags[i]) {
      tag_rows.push_back({make_key('t', i, spec.tracks), make_key('g', g, spec.tags), pareto_count(eng, 1.5, 500)});
    }
  }
  data.tags = TagTable::from_rows(std::move(tag_rows));
  return data;
}

}  // namespace hyperrec
