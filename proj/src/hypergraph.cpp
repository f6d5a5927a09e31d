#include "hyperrec/hypergraph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>

#include <json.hpp>

#include "hyperrec/error.hpp"
#include "hyperrec/random.hpp"

namespace hyperrec {

namespace {

constexpr double kWeightTolerance = 1e-9;

std::size_t kind_slot(VertexKind k) { return static_cast<std::size_t>(k); }

VertexKind hub_kind(EdgeKind k) {
  switch (k) {
    case EdgeKind::kUserTrack: return VertexKind::kUser;
    case EdgeKind::kTagTrack: return VertexKind::kTrack;
    case EdgeKind::kAlbumTrack: return VertexKind::kAlbum;
    case EdgeKind::kArtistTrack: return VertexKind::kArtist;
  }
  throw Error(ErrorKind::kInternal, "bad edge kind");
}

VertexKind member_kind(EdgeKind k) {
  return k == EdgeKind::kTagTrack ? VertexKind::kTag : VertexKind::kTrack;
}

std::uint64_t mix_double(std::uint64_t h, double x) {
  const auto bits = std::bit_cast<std::uint64_t>(x);
  return fnv1a(std::string_view(reinterpret_cast<const char*>(&bits), sizeof bits), h);
}

std::uint64_t mix_int(std::uint64_t h, std::uint64_t x) {
  return fnv1a(std::string_view(reinterpret_cast<const char*>(&x), sizeof x), h);
}

}  // namespace

std::string_view to_string(VertexKind kind) {
  switch (kind) {
    case VertexKind::kUser: return "user";
    case VertexKind::kTrack: return "track";
    case VertexKind::kAlbum: return "album";
    case VertexKind::kArtist: return "artist";
    case VertexKind::kTag: return "tag";
  }
  return "?";
}

std::string_view to_string(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::kUserTrack: return "e1";
    case EdgeKind::kTagTrack: return "e2";
    case EdgeKind::kAlbumTrack: return "e3";
    case EdgeKind::kArtistTrack: return "e4";
  }
  return "?";
}

EdgeKind parse_edge_kind(std::string_view text) {
  if (text == "e1") return EdgeKind::kUserTrack;
  if (text == "e2") return EdgeKind::kTagTrack;
  if (text == "e3") return EdgeKind::kAlbumTrack;
  if (text == "e4") return EdgeKind::kArtistTrack;
  throw ValidationError("unknown hyperedge kind '" + std::string(text) + "' (expected e1..e4)");
}

EdgeKindSet EdgeKindSet::parse(std::string_view list) {
  EdgeKindSet set;
  std::size_t start = 0;
  while (start <= list.size()) {
    std::size_t comma = list.find(',', start);
    if (comma == std::string_view::npos) comma = list.size();
    std::string_view item = list.substr(start, comma - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) set = set.with(parse_edge_kind(item));
    start = comma + 1;
  }
  return set;
}

std::string EdgeKindSet::to_string() const {
  std::string out;
  for (auto k : {EdgeKind::kUserTrack, EdgeKind::kTagTrack, EdgeKind::kAlbumTrack, EdgeKind::kArtistTrack}) {
    if (!contains(k)) continue;
    if (!out.empty()) out += ',';
    out += hyperrec::to_string(k);
  }
  return out;
}

// ---------------------------------------------------------------------------

Hypergraph Hypergraph::from_parts(std::vector<Vertex> vertices, std::vector<Hyperedge> edges) {
  Hypergraph g;
  g.vertices_ = std::move(vertices);
  g.edges_ = std::move(edges);
  g.index();
  return g;
}

void Hypergraph::index() {
  const std::size_t nv = vertices_.size();
  if (nv > std::numeric_limits<VertexIndex>::max() || edges_.size() > std::numeric_limits<EdgeIndex>::max()) {
    throw ValidationError("hypergraph too large for 32-bit indices");
  }

  // Kind blocks must be contiguous and in canonical order.
  for (auto& r : kind_ranges_) r = {0, 0};
  std::size_t pos = 0;
  for (std::size_t k = 0; k < kVertexKindCount; ++k) {
    const auto begin = static_cast<VertexIndex>(pos);
    while (pos < nv && kind_slot(vertices_[pos].kind) == k) {
      const auto [it, inserted] = lookup_[k].emplace(vertices_[pos].key, static_cast<VertexIndex>(pos));
      if (!inserted) {
        throw ValidationError("duplicate vertex " + std::string(hyperrec::to_string(vertices_[pos].kind)) + " '" +
                              vertices_[pos].key + "'");
      }
      ++pos;
    }
    kind_ranges_[k] = {begin, static_cast<VertexIndex>(pos)};
  }
  if (pos != nv) throw ValidationError("vertices are not grouped by kind");

  std::vector<std::size_t> counts(nv, 0);
  slot_offsets_.assign(1, 0);
  slot_vertices_.clear();
  slot_cumulative_.clear();
  std::uint64_t h = mix_int(0xcbf29ce484222325ULL, nv);
  for (const auto& v : vertices_) {
    h = mix_int(h, kind_slot(v.kind));
    h = fnv1a(v.key, h);
    h = mix_int(h, v.key.size());
  }

  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto& edge = edges_[e];
    const std::string where = "edge " + std::to_string(e) + ": ";
    if (edge.members.empty()) throw ValidationError(where + "hub without members");
    if (edge.hub >= nv) throw ValidationError(where + "hub index out of range");
    if (vertices_[edge.hub].kind != hub_kind(edge.kind)) throw ValidationError(where + "hub kind mismatch");
    double sum = 0.0;
    double acc = 1.0;
    slot_vertices_.push_back(edge.hub);
    slot_cumulative_.push_back(acc);
    ++counts[edge.hub];
    h = mix_int(h, static_cast<std::uint64_t>(edge.kind));
    h = mix_int(h, edge.hub);
    for (const auto& m : edge.members) {
      if (m.vertex >= nv) throw ValidationError(where + "member index out of range");
      if (vertices_[m.vertex].kind != member_kind(edge.kind)) throw ValidationError(where + "member kind mismatch");
      if (!(m.weight >= 0.0) || !std::isfinite(m.weight)) throw ValidationError(where + "negative member weight");
      sum += m.weight;
      acc += m.weight;
      slot_vertices_.push_back(m.vertex);
      slot_cumulative_.push_back(acc);
      ++counts[m.vertex];
      h = mix_int(h, m.vertex);
      h = mix_double(h, m.weight);
    }
    if (std::abs(sum - 1.0) > kWeightTolerance) throw ValidationError(where + "member weights do not sum to 1");
    slot_offsets_.push_back(slot_vertices_.size());
  }
  fingerprint_ = h;

  incidence_offsets_.assign(nv + 1, 0);
  for (std::size_t v = 0; v < nv; ++v) incidence_offsets_[v + 1] = incidence_offsets_[v] + counts[v];
  incidences_.assign(incidence_offsets_.back(), Incidence{});
  std::vector<std::size_t> fill(incidence_offsets_.begin(), incidence_offsets_.end() - 1);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto slots = slot_vertices(static_cast<EdgeIndex>(e));
    for (std::uint32_t s = 0; s < slots.size(); ++s) {
      auto& cursor = fill[slots[s]];
      // A vertex may occupy only one slot per edge.
      if (cursor > incidence_offsets_[slots[s]] && incidences_[cursor - 1].edge == e) {
        throw ValidationError("edge " + std::to_string(e) + ": repeated vertex");
      }
      incidences_[cursor++] = Incidence{static_cast<EdgeIndex>(e), s};
    }
  }
}

const Vertex& Hypergraph::vertex(VertexIndex v) const {
  if (v >= vertices_.size()) throw LookupError("vertex index " + std::to_string(v) + " out of range");
  return vertices_[v];
}

const Hyperedge& Hypergraph::edge(EdgeIndex e) const {
  if (e >= edges_.size()) throw LookupError("edge index " + std::to_string(e) + " out of range");
  return edges_[e];
}

std::span<const Incidence> Hypergraph::incident(VertexIndex v) const {
  if (v >= vertices_.size()) throw LookupError("vertex index " + std::to_string(v) + " out of range");
  return std::span<const Incidence>(incidences_).subspan(incidence_offsets_[v],
                                                         incidence_offsets_[v + 1] - incidence_offsets_[v]);
}

std::optional<VertexIndex> Hypergraph::find(VertexKind kind, std::string_view key) const {
  const auto& map = lookup_[kind_slot(kind)];
  const auto it = map.find(std::string(key));
  if (it == map.end()) return std::nullopt;
  return it->second;
}

VertexIndex Hypergraph::require(VertexKind kind, std::string_view key) const {
  if (auto v = find(kind, key)) return *v;
  throw LookupError("unknown " + std::string(hyperrec::to_string(kind)) + " '" + std::string(key) + "'");
}

std::pair<VertexIndex, VertexIndex> Hypergraph::kind_range(VertexKind kind) const {
  return kind_ranges_[kind_slot(kind)];
}

double Hypergraph::vertex_degree(VertexIndex v) const {
  double d = 0.0;
  for (const auto& inc : incident(v)) d += slot_weight(inc.edge, inc.slot);
  return d;
}

double Hypergraph::vertex_degree(VertexKind kind, std::string_view key) const {
  return vertex_degree(require(kind, key));
}

std::size_t Hypergraph::hyperedge_degree(EdgeIndex e) const { return edge(e).degree(); }

bool Hypergraph::is_ordinary_graph() const {
  return std::all_of(edges_.begin(), edges_.end(), [](const Hyperedge& e) { return e.degree() == 2; });
}

std::size_t Hypergraph::count_edges(EdgeKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(edges_.begin(), edges_.end(), [kind](const Hyperedge& e) { return e.kind == kind; }));
}

std::span<const VertexIndex> Hypergraph::slot_vertices(EdgeIndex e) const {
  return std::span<const VertexIndex>(slot_vertices_).subspan(slot_offsets_[e], slot_offsets_[e + 1] - slot_offsets_[e]);
}

std::span<const double> Hypergraph::slot_cumulative(EdgeIndex e) const {
  return std::span<const double>(slot_cumulative_).subspan(slot_offsets_[e], slot_offsets_[e + 1] - slot_offsets_[e]);
}

double Hypergraph::slot_weight(EdgeIndex e, std::uint32_t slot) const {
  return slot == 0 ? 1.0 : edges_[e].members[slot - 1].weight;
}

// ---------------------------------------------------------------------------

namespace {

// Collects vertices per kind in first-seen order before dense indices exist.
class VertexRegistry {
 public:
  std::size_t intern(VertexKind kind, const std::string& key) {
    auto& block = blocks_[kind_slot(kind)];
    const auto [it, inserted] = block.index.emplace(key, block.keys.size());
    if (inserted) block.keys.push_back(key);
    return it->second;
  }

  bool contains(VertexKind kind, const std::string& key) const {
    return blocks_[kind_slot(kind)].index.count(key) != 0;
  }

  std::vector<Vertex> flatten(std::array<std::size_t, kVertexKindCount>& base) const {
    std::vector<Vertex> out;
    for (std::size_t k = 0; k < kVertexKindCount; ++k) {
      base[k] = out.size();
      for (const auto& key : blocks_[k].keys) out.push_back({static_cast<VertexKind>(k), key});
    }
    return out;
  }

 private:
  struct Block {
    std::vector<std::string> keys;
    std::unordered_map<std::string, std::size_t> index;
  };
  std::array<Block, kVertexKindCount> blocks_;
};

struct PendingEdge {
  EdgeKind kind;
  std::size_t hub;  // local index within the hub kind block
  std::vector<std::pair<std::size_t, double>> members;
};

// Normalizes raw counts into member weights that sum to 1.
std::vector<std::pair<std::size_t, double>> normalize(const std::vector<std::pair<std::size_t, std::uint64_t>>& raw) {
  long double total = 0;
  for (const auto& [_, c] : raw) total += static_cast<long double>(c);
  std::vector<std::pair<std::size_t, double>> out;
  out.reserve(raw.size());
  for (const auto& [v, c] : raw) out.emplace_back(v, static_cast<double>(static_cast<long double>(c) / total));
  return out;
}

}  // namespace

Hypergraph build_hypergraph(const InteractionTable& train, const Catalog& catalog, const TagTable& tags,
                            EdgeKindSet enabled) {
  if (!enabled.contains(EdgeKind::kUserTrack)) {
    throw ValidationError("the user-track hyperedge (e1) cannot be disabled");
  }
  if (train.empty()) throw ValidationError("cannot build a hypergraph from an empty training table");

  VertexRegistry reg;
  std::vector<PendingEdge> pending;

  // e1: one edge per user over their training tracks.
  for (auto rows : train.by_user()) {
    PendingEdge e{EdgeKind::kUserTrack, reg.intern(VertexKind::kUser, rows.front().user), {}};
    std::vector<std::pair<std::size_t, std::uint64_t>> raw;
    for (const auto& r : rows) {
      if (!catalog.find(r.track)) throw LookupError("track '" + r.track + "' is missing from the catalog");
      raw.emplace_back(reg.intern(VertexKind::kTrack, r.track), r.plays);
    }
    e.members = normalize(raw);
    pending.push_back(std::move(e));
  }

  // e2: one edge per known tagged track; counts aggregated over all users.
  if (enabled.contains(EdgeKind::kTagTrack)) {
    for (auto rows : tags.by_track()) {
      const std::string& track = rows.front().track;
      if (!reg.contains(VertexKind::kTrack, track) && !catalog.find(track)) continue;
      PendingEdge e{EdgeKind::kTagTrack, reg.intern(VertexKind::kTrack, track), {}};
      std::vector<std::pair<std::size_t, std::uint64_t>> raw;
      for (const auto& r : rows) raw.emplace_back(reg.intern(VertexKind::kTag, r.tag), r.count);
      e.members = normalize(raw);
      pending.push_back(std::move(e));
    }
  }

  // e3/e4: group training tracks by album and by artist, using total
  // training plays per track.
  const auto totals = train.track_totals();
  std::vector<std::pair<std::string, std::uint64_t>> played;  // first-seen order
  {
    std::unordered_map<std::string, bool> seen;
    for (const auto& r : train.rows()) {
      if (seen.emplace(r.track, true).second) played.emplace_back(r.track, totals.find(r.track)->second);
    }
  }

  auto group_edges = [&](EdgeKind kind, VertexKind hub, auto&& key_of) {
    std::vector<std::string> order;
    std::unordered_map<std::string, std::vector<std::pair<std::size_t, std::uint64_t>>> groups;
    for (const auto& [track, plays] : played) {
      const std::optional<std::string> key = key_of(*catalog.find(track));
      if (!key) continue;
      auto [it, inserted] = groups.try_emplace(*key);
      if (inserted) order.push_back(*key);
      it->second.emplace_back(reg.intern(VertexKind::kTrack, track), plays);
    }
    for (const auto& key : order) {
      pending.push_back(PendingEdge{kind, reg.intern(hub, key), normalize(groups[key])});
    }
  };
  if (enabled.contains(EdgeKind::kAlbumTrack)) {
    group_edges(EdgeKind::kAlbumTrack, VertexKind::kAlbum, [](const TrackInfo& t) { return t.album; });
  }
  if (enabled.contains(EdgeKind::kArtistTrack)) {
    group_edges(EdgeKind::kArtistTrack, VertexKind::kArtist,
                [](const TrackInfo& t) { return std::optional<std::string>(t.artist); });
  }

  std::array<std::size_t, kVertexKindCount> base{};
  std::vector<Vertex> vertices = reg.flatten(base);
  const auto member_block = [](EdgeKind k) { return kind_slot(member_kind(k)); };
  std::vector<Hyperedge> edges;
  edges.reserve(pending.size());
  for (auto& p : pending) {
    Hyperedge e{p.kind, static_cast<VertexIndex>(base[kind_slot(hub_kind(p.kind))] + p.hub), {}};
    e.members.reserve(p.members.size());
    for (const auto& [local, w] : p.members) {
      e.members.push_back({static_cast<VertexIndex>(base[member_block(p.kind)] + local), w});
    }
    edges.push_back(std::move(e));
  }
  return Hypergraph::from_parts(std::move(vertices), std::move(edges));
}

IncidenceMatrix incidence_matrix(const Hypergraph& g) {
  IncidenceMatrix m;
  m.rows = g.vertex_count();
  m.cols = g.edge_count();
  for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
    std::vector<VertexIndex> col(g.slot_vertices(e).begin(), g.slot_vertices(e).end());
    std::sort(col.begin(), col.end());
    for (VertexIndex v : col) m.entries.emplace_back(v, e);
  }
  return m;
}

void write_edges_jsonl(std::ostream& out, const Hypergraph& g) {
  for (const auto& e : g.edges()) {
    nlohmann::json members = nlohmann::json::array();
    for (const auto& m : e.members) members.push_back({g.vertex(m.vertex).key, m.weight});
    nlohmann::json line = {{"kind", to_string(e.kind)}, {"hub", g.vertex(e.hub).key}, {"members", members}};
    out << line.dump() << '\n';
  }
}

void write_edges_jsonl(const std::filesystem::path& path, const Hypergraph& g) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_edges_jsonl(out, g);
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace hyperrec
