#include <doctest.h>

#include <set>
#include <sstream>

#include "hyperrec/dataset.hpp"
#include "hyperrec/error.hpp"
#include "hyperrec/hypergraph.hpp"
#include "hyperrec/walker.hpp"
#include "support.hpp"

using namespace hyperrec;

namespace {

Hypergraph pair_graph() {
  return Hypergraph::from_parts({{VertexKind::kUser, "u"}, {VertexKind::kTrack, "t"}},
                                {{EdgeKind::kUserTrack, 0, {{1, 1.0}}}});
}

/// Artist hub a with members t1 (0.75) and t2 (0.25). a=2, t1=0, t2=1.
Hypergraph artist_graph() {
  return Hypergraph::from_parts({{VertexKind::kTrack, "t1"}, {VertexKind::kTrack, "t2"}, {VertexKind::kArtist, "a"}},
                                {{EdgeKind::kArtistTrack, 2, {{0, 0.75}, {1, 0.25}}}});
}

Hypergraph synthetic_graph(std::uint64_t seed = 7) {
  const auto d = generate_synthetic({.users = 20, .tracks = 120, .artists = 10, .albums = 14, .tags = 12, .seed = seed});
  return build_hypergraph(d.interactions, d.catalog, d.tags);
}

std::vector<std::size_t> sample_vertices(const Hypergraph& g, VertexIndex from, EdgeIndex edge, double stay,
                                         std::size_t draws) {
  std::vector<std::size_t> counts(g.vertex_count(), 0);
  Engine rng(12345);
  for (std::size_t i = 0; i < draws; ++i) ++counts[step(g, from, edge, stay, rng).vertex];
  return counts;
}

}  // namespace

TEST_CASE("walk counts and lengths") {
  const auto g = synthetic_graph();
  WalkConfig cfg;
  cfg.iterations = 5;
  cfg.length = 200;
  const auto corpus = generate_walks(g, cfg);
  CHECK(corpus.walks.size() == 5 * g.vertex_count());
  for (const auto& w : corpus.walks) CHECK(w.size() == 200);
  CHECK(corpus.graph_fingerprint == g.fingerprint());
  for (std::size_t i = 0; i < corpus.walks.size(); ++i) CHECK(corpus.walks[i].front() == i / 5);
}

TEST_CASE("hundred user starts give five hundred walks") {
  const auto d = generate_synthetic({.users = 100, .tracks = 300, .artists = 10, .albums = 14, .tags = 12});
  const auto g = build_hypergraph(d.interactions, d.catalog, d.tags);
  WalkConfig cfg;
  cfg.start_kinds.reset().set(static_cast<std::size_t>(VertexKind::kUser));
  const auto corpus = generate_walks(g, cfg);
  CHECK(corpus.walks.size() == 500);
  for (const auto& w : corpus.walks) {
    CHECK(w.size() == 200);
    CHECK(g.vertex(w.front()).kind == VertexKind::kUser);
  }
}

TEST_CASE("length one walks are just the start vertex") {
  const auto g = synthetic_graph();
  WalkConfig cfg;
  cfg.length = 1;
  cfg.iterations = 2;
  const auto corpus = generate_walks(g, cfg);
  REQUIRE(corpus.walks.size() == 2 * g.vertex_count());
  for (std::size_t i = 0; i < corpus.walks.size(); ++i) CHECK(corpus.walks[i] == Walk{static_cast<VertexIndex>(i / 2)});
}

TEST_CASE("single edge walks alternate") {
  const auto g = pair_graph();
  for (double stay : {0.0, 0.5, 1.0}) {
    WalkConfig cfg;
    cfg.length = 50;
    cfg.iterations = 3;
    cfg.stay_probability = stay;
    for (const auto& w : generate_walks(g, cfg).walks) {
      for (std::size_t i = 0; i < w.size(); ++i) CHECK(w[i] == (w.front() + i) % 2);
    }
  }
}

TEST_CASE("forced choice on a two-vertex edge") {
  const auto g = pair_graph();
  Engine rng(1);
  for (int i = 0; i < 100; ++i) {
    CHECK(step(g, 0, 0, 1.0, rng).vertex == 1);
    CHECK(step(g, 1, 0, 1.0, rng).vertex == 0);
  }
}

TEST_CASE("hub step follows member weights") {
  const auto g = artist_graph();
  const auto counts = sample_vertices(g, 2, 0, 1.0, 100000);
  CHECK(counts[2] == 0);
  CHECK(testing::chi_square_p(counts, {0.75, 0.25, 0.0}) > 0.001);
}

TEST_CASE("member step renormalizes without itself") {
  const auto g = artist_graph();
  const auto counts = sample_vertices(g, 0, 0, 1.0, 100000);
  CHECK(counts[0] == 0);
  CHECK(testing::chi_square_p(counts, {0.0, 0.2, 0.8}) > 0.001);
}

TEST_CASE("step law over three overlapping edges") {
  const auto g = testing::three_edge_graph();
  for (double stay : {0.0, 0.5, 0.9}) {
    for (EdgeIndex from_edge = 0; from_edge < 3; ++from_edge) {
      const auto law = testing::step_law(g, 1, from_edge, stay);
      std::vector<std::size_t> counts(law.size(), 0);
      Engine rng(derive_seed({99, from_edge}));
      for (int i = 0; i < 100000; ++i) {
        const auto r = step(g, 1, from_edge, stay, rng);
        ++counts[r.vertex * g.edge_count() + r.edge];
      }
      CHECK(testing::chi_square_p(counts, law) > 0.001);
    }
  }
}

TEST_CASE("every transition shares an edge") {
  const auto g = synthetic_graph();
  const auto corpus = generate_walks(g, WalkConfig{});
  // Independent checker: pair sets straight from the edge list.
  std::set<std::pair<VertexIndex, VertexIndex>> together;
  for (const auto& e : g.edges()) {
    std::vector<VertexIndex> vs = {e.hub};
    for (const auto& m : e.members) vs.push_back(m.vertex);
    for (auto a : vs) {
      for (auto b : vs) {
        if (a != b) together.insert({a, b});
      }
    }
  }
  std::size_t bad = 0;
  std::size_t transitions = 0;
  for (const auto& w : corpus.walks) {
    for (std::size_t i = 1; i < w.size(); ++i, ++transitions) bad += together.count({w[i - 1], w[i]}) == 0;
  }
  CHECK(bad == 0);
  const auto check = check_walks(g, corpus);
  CHECK(check.transitions == transitions);
  CHECK(check.violations == 0);
}

TEST_CASE("walk checker flags broken transitions") {
  const auto g = testing::three_edge_graph();
  WalkCorpus c;
  c.walks = {{0, 1, 1}, {4, 3}};  // self step, then album b to t3 (no shared edge)
  const auto check = check_walks(g, c);
  CHECK(check.transitions == 3);
  CHECK(check.violations == 2);
  CHECK(co_occur(g, 0, 3));
  CHECK_FALSE(co_occur(g, 4, 3));
}

TEST_CASE("corpus does not depend on thread count") {
  const auto g = synthetic_graph(3);
  WalkConfig one;
  one.length = 60;
  WalkConfig many = one;
  many.threads = 4;
  CHECK(generate_walks(g, one).walks == generate_walks(g, many).walks);
  WalkConfig other = one;
  other.seed = 43;
  CHECK_FALSE(generate_walks(g, one).walks == generate_walks(g, other).walks);
}

TEST_CASE("long walks cover a connected graph") {
  // 4 users x 12 tracks, chained through shared tracks: 16 vertices plus
  // 2 artists and 2 albums gives a 20-vertex connected graph.
  std::vector<Interaction> rows;
  for (int u = 0; u < 4; ++u) {
    for (int t = 3 * u; t < 3 * u + 4 && t < 12; ++t) rows.push_back({"u" + std::to_string(u), "t" + std::to_string(t), 1});
  }
  Catalog c;
  for (int t = 0; t < 12; ++t) {
    c.add("t" + std::to_string(t), {t % 2 ? "ar1" : "ar2", std::string(t < 6 ? "al1" : "al2")});
  }
  const auto g = build_hypergraph(InteractionTable::from_rows(rows), c, {});
  REQUIRE(g.vertex_count() == 20);
  WalkConfig cfg;
  cfg.iterations = 50;
  cfg.length = 200;
  std::set<VertexIndex> seen;
  for (const auto& w : generate_walks(g, cfg).walks) seen.insert(w.begin(), w.end());
  CHECK(seen.size() == 20);
}

TEST_CASE("corpus round trips through text") {
  const auto g = synthetic_graph();
  WalkConfig cfg;
  cfg.length = 17;
  cfg.iterations = 2;
  cfg.stay_probability = 0.3;
  const auto corpus = generate_walks(g, cfg);
  std::stringstream buf;
  write_corpus(buf, corpus);
  const auto back = read_corpus(buf);
  CHECK(back.walks == corpus.walks);
  CHECK(back.graph_fingerprint == corpus.graph_fingerprint);
  CHECK(back.config.length == 17);
  CHECK(back.config.iterations == 2);
  CHECK(back.config.stay_probability == 0.3);

  std::stringstream again;
  write_corpus(again, back);
  std::stringstream first;
  write_corpus(first, corpus);
  CHECK(again.str() == first.str());
}

TEST_CASE("corrupt corpus is rejected") {
  std::istringstream no_header("1 2 3\n");
  CHECK_THROWS_AS(read_corpus(no_header), Error);
  std::istringstream garbage("#hyperrec-walks v1 fingerprint=00 length=2 iterations=1\n1 x\n");
  CHECK_THROWS_AS(read_corpus(garbage), Error);
}

TEST_CASE("walk config validation") {
  WalkConfig cfg;
  cfg.iterations = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = {};
  cfg.length = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = {};
  cfg.stay_probability = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}
