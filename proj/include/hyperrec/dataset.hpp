#pragma once

// Listening-history, catalog and tag tables, the per-user top-k filter,
// reproducible train/test splitting, and a synthetic data generator.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hyperrec {

struct Interaction {
  std::string user;
  std::string track;
  std::uint64_t plays = 0;

  friend bool operator==(const Interaction&, const Interaction&) = default;
};

/// User -> track play counts. Rows are unique per (user, track) and kept
/// sorted by (user, track), so each user's rows are contiguous.
class InteractionTable {
 public:
  InteractionTable() = default;

  /// Sums duplicate (user, track) pairs and sorts. Throws ValidationError
  /// on a zero play count.
  static InteractionTable from_rows(std::vector<Interaction> rows);

  std::span<const Interaction> rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }

  /// One span per user, in ascending user order.
  std::vector<std::span<const Interaction>> by_user() const;
  std::span<const Interaction> user_rows(std::string_view user) const;

  std::size_t user_count() const;
  std::size_t track_count() const;

  /// Summed play count per track across all users.
  std::map<std::string, std::uint64_t, std::less<>> track_totals() const;

  friend bool operator==(const InteractionTable&, const InteractionTable&) = default;

 private:
  std::vector<Interaction> rows_;
};

struct TrackInfo {
  std::string artist;
  std::optional<std::string> album;

  friend bool operator==(const TrackInfo&, const TrackInfo&) = default;
};

class Catalog {
 public:
  using Map = std::map<std::string, TrackInfo, std::less<>>;

  /// Throws ValidationError on an empty artist or a conflicting duplicate.
  void add(std::string track, TrackInfo info);
  const TrackInfo* find(std::string_view track) const;

  const Map& entries() const { return tracks_; }
  std::size_t size() const { return tracks_.size(); }

  friend bool operator==(const Catalog&, const Catalog&) = default;

 private:
  Map tracks_;
};

struct TagCount {
  std::string track;
  std::string tag;
  std::uint64_t count = 0;

  friend bool operator==(const TagCount&, const TagCount&) = default;
};

/// (track, tag) annotation counts, unique per pair and sorted.
class TagTable {
 public:
  TagTable() = default;
  static TagTable from_rows(std::vector<TagCount> rows);

  std::span<const TagCount> rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }

  /// One span per tagged track, in ascending track order.
  std::vector<std::span<const TagCount>> by_track() const;

  friend bool operator==(const TagTable&, const TagTable&) = default;

 private:
  std::vector<TagCount> rows_;
};

// ---- file formats (tab separated, LF terminated, UTF-8 keys) ----

InteractionTable parse_interactions(std::istream& in, const std::string& source = "<stream>");
InteractionTable parse_interactions(const std::filesystem::path& path);
Catalog parse_catalog(std::istream& in, const std::string& source = "<stream>");
Catalog parse_catalog(const std::filesystem::path& path);
TagTable parse_tags(std::istream& in, const std::string& source = "<stream>");
TagTable parse_tags(const std::filesystem::path& path);

void write_interactions(std::ostream& out, const InteractionTable& table);
void write_interactions(const std::filesystem::path& path, const InteractionTable& table);
void write_catalog(std::ostream& out, const Catalog& catalog);
void write_catalog(const std::filesystem::path& path, const Catalog& catalog);
void write_tags(std::ostream& out, const TagTable& tags);
void write_tags(const std::filesystem::path& path, const TagTable& tags);

// ---- filtering and splitting ----

/// Keeps each user's k most-played tracks; ties go to the smaller track id.
InteractionTable filter_top_k_per_user(const InteractionTable& table, std::size_t k);

struct SplitSpec {
  double train_ratio = 0.9;
  std::size_t fold_index = 0;
  std::size_t folds = 10;
  std::uint64_t seed = 42;

  void validate() const;
};

struct SplitResult {
  InteractionTable train;
  InteractionTable test;
  /// Users with a single track: kept in train, absent from test.
  std::vector<std::string> skipped_users;
};

/// Number of held-out tracks for a user with `n` tracks (n >= 2).
std::size_t test_size_for(std::size_t n, double train_ratio);

/// Each user's tracks are shuffled once with a stream keyed by
/// (seed, user); fold i holds out the window of test_size_for(n) tracks
/// starting at i * test_size (mod n). When n = folds * test_size the
/// windows partition the user's tracks.
SplitResult split(const InteractionTable& table, const SplitSpec& spec);

// ---- synthetic data ----

struct SyntheticSpec {
  std::size_t users = 50;
  std::size_t tracks = 500;
  std::size_t artists = 40;
  std::size_t albums = 60;
  std::size_t tags = 30;
  std::uint64_t seed = 7;
  /// Distinct tracks per user; 0 picks max(ceil(tracks / users), min(tracks, 20)).
  std::size_t tracks_per_user = 0;
  /// Number of latent taste clusters; 0 picks min(artists, tags, 8).
  std::size_t clusters = 0;
  /// Probability that a user's pick or a track's tag comes from its own cluster.
  double cluster_affinity = 0.85;

  std::size_t effective_tracks_per_user() const;
  std::size_t effective_clusters() const;
  void validate() const;
};

struct SyntheticDataset {
  InteractionTable interactions;
  Catalog catalog;
  TagTable tags;
};

/// Clustered taste model: artists and tags belong to clusters, each user
/// prefers one cluster, play counts follow a heavy-tailed law. Every
/// requested user, track, artist, album and tag appears in the output.
SyntheticDataset generate_synthetic(const SyntheticSpec& spec);

}  // namespace hyperrec
