#pragma once

// Shared fixtures for the test binaries.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "hyperrec/dataset.hpp"
#include "hyperrec/hypergraph.hpp"

namespace testing {

namespace fs = std::filesystem;

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("hyperrec-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

/// Runs the CLI with `args` (already shell-quoted where needed).
inline RunResult run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + std::string(HYPERREC_BIN) + " " + args + " 2>&1";
  RunResult r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, got);
  const int status = ::pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

/// u1 plays {t1:3, t2:1}; t1 tagged {rock:2, jazz:2}; t1, t2 on album al1
/// by artist ar1.
struct TinyData {
  hyperrec::InteractionTable train;
  hyperrec::Catalog catalog;
  hyperrec::TagTable tags;

  TinyData() {
    train = hyperrec::InteractionTable::from_rows({{"u1", "t1", 3}, {"u1", "t2", 1}});
    catalog.add("t1", {"ar1", "al1"});
    catalog.add("t2", {"ar1", "al1"});
    tags = hyperrec::TagTable::from_rows({{"t1", "rock", 2}, {"t1", "jazz", 2}});
  }
};

/// Three overlapping edges around track t1:
///   e1 u -> {t1 .5, t2 .3, t3 .2}, e3 b -> {t1 .6, t2 .4}, e4 a -> {t1 .75, t3 .25}.
/// Vertices: u=0, t1=1, t2=2, t3=3, b=4, a=5. Edges in that order.
inline hyperrec::Hypergraph three_edge_graph() {
  using namespace hyperrec;
  std::vector<Vertex> vs = {{VertexKind::kUser, "u"},   {VertexKind::kTrack, "t1"}, {VertexKind::kTrack, "t2"},
                            {VertexKind::kTrack, "t3"}, {VertexKind::kAlbum, "b"},  {VertexKind::kArtist, "a"}};
  std::vector<Hyperedge> es = {{EdgeKind::kUserTrack, 0, {{1, 0.5}, {2, 0.3}, {3, 0.2}}},
                               {EdgeKind::kAlbumTrack, 4, {{1, 0.6}, {2, 0.4}}},
                               {EdgeKind::kArtistTrack, 5, {{1, 0.75}, {3, 0.25}}}};
  return Hypergraph::from_parts(std::move(vs), std::move(es));
}

/// Exact joint law of (next vertex, next edge) for one step, computed
/// straight from the edge list: stay with probability s, else a uniform
/// incident edge; then weight-proportional among the other vertices.
/// Result is indexed [vertex * edge_count + edge].
inline std::vector<double> step_law(const hyperrec::Hypergraph& g, hyperrec::VertexIndex current,
                                    hyperrec::EdgeIndex current_edge, double s) {
  using namespace hyperrec;
  const std::size_t ne = g.edge_count();
  std::vector<EdgeIndex> incident;
  for (EdgeIndex e = 0; e < ne; ++e) {
    const auto& edge = g.edge(e);
    bool has = edge.hub == current;
    for (const auto& m : edge.members) has = has || m.vertex == current;
    if (has) incident.push_back(e);
  }
  std::vector<double> law(g.vertex_count() * ne, 0.0);
  auto spread = [&](EdgeIndex e, double mass) {
    const auto& edge = g.edge(e);
    std::vector<std::pair<VertexIndex, double>> others;
    if (edge.hub != current) others.emplace_back(edge.hub, 1.0);
    for (const auto& m : edge.members) {
      if (m.vertex != current) others.emplace_back(m.vertex, m.weight);
    }
    double z = 0.0;
    for (const auto& [v, w] : others) z += w;
    for (const auto& [v, w] : others) law[v * ne + e] += mass * w / z;
  };
  spread(current_edge, s);
  for (EdgeIndex e : incident) spread(e, (1.0 - s) / static_cast<double>(incident.size()));
  return law;
}

/// Pearson goodness-of-fit p-value of `observed` counts against
/// `expected` probabilities (cells with zero probability must be empty).
inline double chi_square_p(const std::vector<std::size_t>& observed, const std::vector<double>& expected) {
  double total = 0.0;
  for (auto o : observed) total += static_cast<double>(o);
  double stat = 0.0;
  std::size_t cells = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] == 0.0) {
      if (observed[i] != 0) return 0.0;
      continue;
    }
    const double e = expected[i] * total;
    const double d = static_cast<double>(observed[i]) - e;
    stat += d * d / e;
    ++cells;
  }
  if (cells < 2) return 1.0;
  const boost::math::chi_squared dist(static_cast<double>(cells - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace testing
