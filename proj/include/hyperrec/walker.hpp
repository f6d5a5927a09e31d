#pragma once

#include <bitset>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hyperrec/hypergraph.hpp"
#include "hyperrec/random.hpp"

namespace hyperrec {

struct WalkConfig {
  std::size_t iterations = 5;  // walks per start vertex
  std::size_t length = 200;    // vertices per walk
  /// Probability of staying on the current hyperedge before each move.
  double stay_probability = 0.5;
  std::uint64_t seed = 42;
  /// Bit i enables starts from VertexKind(i).
  std::bitset<kVertexKindCount> start_kinds = std::bitset<kVertexKindCount>().set();
  std::size_t threads = 1;

  void validate() const;
};

using Walk = std::vector<VertexIndex>;

struct WalkCorpus {
  std::vector<Walk> walks;  // ordered by (start vertex, iteration)
  std::uint64_t graph_fingerprint = 0;
  WalkConfig config;
  /// Start vertices that had no incident edge.
  std::vector<VertexIndex> skipped;

  std::size_t token_count() const;
};

struct StepResult {
  VertexIndex vertex;
  EdgeIndex edge;
};

/// One transition: keep `current_edge` with probability `stay_probability`,
/// otherwise pick a uniform incident edge of `current` (possibly the same);
/// then pick another vertex of that edge proportionally to its in-edge
/// weight (hub 1) with `current` excluded.
StepResult step(const Hypergraph& g, VertexIndex current, EdgeIndex current_edge,
                double stay_probability, Engine& rng);

/// Walk for (vertex v, iteration i) uses the stream derive_seed(seed, v, i),
/// so the corpus is identical for any thread count.
WalkCorpus generate_walks(const Hypergraph& g, const WalkConfig& config);

/// True when some hyperedge contains both vertices.
bool co_occur(const Hypergraph& g, VertexIndex a, VertexIndex b);

struct WalkCheck {
  std::size_t transitions = 0;
  std::size_t violations = 0;  // pairs sharing no edge, or self-transitions
};

WalkCheck check_walks(const Hypergraph& g, const WalkCorpus& corpus);

/// Header line "#hyperrec-walks v1 key=value ..." then one walk per line
/// as space-separated vertex indices.
void write_corpus(std::ostream& out, const WalkCorpus& corpus);
void write_corpus(const std::filesystem::path& path, const WalkCorpus& corpus);
WalkCorpus read_corpus(std::istream& in, const std::string& source = "<stream>");
WalkCorpus read_corpus(const std::filesystem::path& path);

}  // namespace hyperrec
