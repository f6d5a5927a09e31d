#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hyperrec/dataset.hpp"

namespace hyperrec {

enum class VertexKind : std::uint8_t { kUser = 0, kTrack, kAlbum, kArtist, kTag };
inline constexpr std::size_t kVertexKindCount = 5;

/// e1 listening (user hub), e2 tagging (track hub), e3 album, e4 artist.
enum class EdgeKind : std::uint8_t { kUserTrack = 1, kTagTrack = 2, kAlbumTrack = 3, kArtistTrack = 4 };

std::string_view to_string(VertexKind kind);
std::string_view to_string(EdgeKind kind);  // "e1".."e4"
EdgeKind parse_edge_kind(std::string_view text);

using VertexIndex = std::uint32_t;
using EdgeIndex = std::uint32_t;

struct Vertex {
  VertexKind kind;
  std::string key;
};

struct Member {
  VertexIndex vertex;
  double weight;
};

/// A hub vertex (weight 1) plus members whose weights sum to 1.
struct Hyperedge {
  EdgeKind kind;
  VertexIndex hub;
  std::vector<Member> members;

  std::size_t degree() const { return 1 + members.size(); }
};

/// Where a vertex sits inside an edge: slot 0 is the hub, slot i > 0 is
/// members[i - 1].
struct Incidence {
  EdgeIndex edge;
  std::uint32_t slot;
};

class EdgeKindSet {
 public:
  constexpr EdgeKindSet() = default;
  static constexpr EdgeKindSet all() { return EdgeKindSet(0b1111); }
  static constexpr EdgeKindSet none() { return EdgeKindSet(0); }
  /// Comma-separated "e2,e3"; empty string gives the empty set.
  static EdgeKindSet parse(std::string_view list);

  constexpr bool contains(EdgeKind k) const { return bits_ & bit(k); }
  constexpr EdgeKindSet with(EdgeKind k) const { return EdgeKindSet(bits_ | bit(k)); }
  constexpr EdgeKindSet without(EdgeKind k) const { return EdgeKindSet(bits_ & ~bit(k)); }
  std::string to_string() const;

  friend constexpr bool operator==(EdgeKindSet, EdgeKindSet) = default;

 private:
  constexpr explicit EdgeKindSet(unsigned bits) : bits_(bits) {}
  static constexpr unsigned bit(EdgeKind k) { return 1u << (static_cast<unsigned>(k) - 1); }
  unsigned bits_ = 0;
};

/// Coordinate-list form of the |V| x |E| 0/1 incidence matrix.
struct IncidenceMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::pair<VertexIndex, EdgeIndex>> entries;  // sorted by (col, row)
};

/// Immutable weighted hypergraph. Vertex indices are dense and grouped in
/// kind blocks (users, tracks, albums, artists, tags).
class Hypergraph {
 public:
  Hypergraph() = default;

  /// Assembles a graph from explicit parts, checking every structural
  /// invariant. Vertices must already be grouped by kind.
  static Hypergraph from_parts(std::vector<Vertex> vertices, std::vector<Hyperedge> edges);

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const Vertex& vertex(VertexIndex v) const;
  const Hyperedge& edge(EdgeIndex e) const;
  std::span<const Vertex> vertices() const { return vertices_; }
  std::span<const Hyperedge> edges() const { return edges_; }
  std::span<const Incidence> incident(VertexIndex v) const;

  std::optional<VertexIndex> find(VertexKind kind, std::string_view key) const;
  /// Throws LookupError when absent.
  VertexIndex require(VertexKind kind, std::string_view key) const;
  /// Half-open index range of one kind block.
  std::pair<VertexIndex, VertexIndex> kind_range(VertexKind kind) const;

  /// Sum over incident edges of the vertex's in-edge weight (hub 1,
  /// member its normalized weight); every edge carries weight 1.
  double vertex_degree(VertexIndex v) const;
  double vertex_degree(VertexKind kind, std::string_view key) const;
  std::size_t hyperedge_degree(EdgeIndex e) const;
  /// True when every edge joins exactly two vertices.
  bool is_ordinary_graph() const;
  std::size_t count_edges(EdgeKind kind) const;

  // Per-edge slot tables used by the walker.
  std::span<const VertexIndex> slot_vertices(EdgeIndex e) const;
  std::span<const double> slot_cumulative(EdgeIndex e) const;
  double slot_weight(EdgeIndex e, std::uint32_t slot) const;

  /// Content hash over vertices, edges and weights.
  std::uint64_t fingerprint() const { return fingerprint_; }

 private:
  void index();

  std::vector<Vertex> vertices_;
  std::vector<Hyperedge> edges_;
  std::vector<std::size_t> incidence_offsets_;
  std::vector<Incidence> incidences_;
  std::vector<std::size_t> slot_offsets_;
  std::vector<VertexIndex> slot_vertices_;
  std::vector<double> slot_cumulative_;
  std::array<std::pair<VertexIndex, VertexIndex>, kVertexKindCount> kind_ranges_{};
  std::array<std::unordered_map<std::string, VertexIndex>, kVertexKindCount> lookup_;
  std::uint64_t fingerprint_ = 0;
};

/// One e1 edge per user, one e2 edge per tagged known track, one e3 edge
/// per album and one e4 edge per artist with at least one training play.
/// Album/artist member weights use the track's total training play count.
/// Throws ValidationError if e1 is disabled or train is empty, LookupError
/// if a training track has no catalog entry.
Hypergraph build_hypergraph(const InteractionTable& train, const Catalog& catalog,
                            const TagTable& tags, EdgeKindSet enabled = EdgeKindSet::all());

IncidenceMatrix incidence_matrix(const Hypergraph& g);

/// One JSON object per line: {"kind":"e1","hub":"u1","members":[["t1",0.75],...]}.
void write_edges_jsonl(std::ostream& out, const Hypergraph& g);
void write_edges_jsonl(const std::filesystem::path& path, const Hypergraph& g);

}  // namespace hyperrec
