#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "hyperrec/dataset.hpp"
#include "hyperrec/embedding.hpp"
#include "hyperrec/error.hpp"
#include "hyperrec/hypergraph.hpp"
#include "hyperrec/ranker.hpp"
#include "hyperrec/walker.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace hyperrec;

namespace {

using Vec = std::vector<double>;

using testing::direct_loss;
using testing::norm_rel_error;
using testing::call_pair_loss;

WalkCorpus corpus_of(std::vector<Walk> walks) {
  WalkCorpus c;
  c.walks = std::move(walks);
  return c;
}

/// 100 walks of length 40 over a small synthetic hypergraph.
struct FixedCorpus {
  Hypergraph graph;
  WalkCorpus corpus;

  FixedCorpus() {
    const auto d = generate_synthetic({.users = 20, .tracks = 100, .artists = 8, .albums = 12, .tags = 10, .seed = 2});
    graph = build_hypergraph(d.interactions, d.catalog, d.tags);
    WalkConfig cfg;
    cfg.iterations = 1;
    cfg.length = 40;
    corpus = generate_walks(graph, cfg);
    corpus.walks.resize(100);
  }
};

double mean_cosine(const EmbeddingTable& t, const std::vector<std::pair<VertexIndex, VertexIndex>>& pairs) {
  double s = 0.0;
  for (const auto& [a, b] : pairs) s += cosine(t.row(a), t.row(b));
  return s / static_cast<double>(pairs.size());
}

}  // namespace

TEST_CASE("pair loss at the origin") {
  const Vec zero(4, 0.0);
  const auto r = call_pair_loss(zero, zero, {zero});
  CHECK(r.loss == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("pair loss without negatives") {
  const Vec u = {0.3, -0.2, 0.5};
  const Vec v = {0.1, 0.4, -0.7};
  const double uv = 0.03 - 0.08 - 0.35;
  const auto r = call_pair_loss(u, v, {});
  CHECK(r.loss == doctest::Approx(-std::log(1.0 / (1.0 + std::exp(-uv)))).epsilon(1e-14));
  CHECK(r.grad_negatives.empty());
}

TEST_CASE("pair loss in the confident limit keeps only the noise term") {
  const Vec u = {40.0, 0.0};
  const Vec v = {40.0, 0.0};
  const Vec n = {0.0, 1.0};
  const auto r = call_pair_loss(u, v, {n});
  CHECK(r.loss == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  const auto far = call_pair_loss({400.0, 0.0}, {400.0, 0.0}, {{-400.0, 0.0}});
  CHECK(std::isfinite(far.loss));
  CHECK(far.loss >= 0.0);
}

TEST_CASE("pair loss matches the direct formula") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Vec u(6), v(6);
    std::vector<Vec> negs(3, Vec(6));
    for (auto& x : u) x = g(rng);
    for (auto& x : v) x = g(rng);
    for (auto& n : negs) for (auto& x : n) x = g(rng);
    CHECK(call_pair_loss(u, v, negs).loss == doctest::Approx(direct_loss(u, v, negs)).epsilon(1e-12));
  }
}

TEST_CASE("analytic gradients match central differences") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g(0.0, 0.7);
  std::uniform_int_distribution<int> neg_count(0, 5);
  const double h = 1e-8;
  for (int draw = 0; draw < 100; ++draw) {
    const std::size_t s = 8;
    Vec u(s), v(s);
    std::vector<Vec> negs(static_cast<std::size_t>(neg_count(rng)), Vec(s));
    for (auto& x : u) x = g(rng);
    for (auto& x : v) x = g(rng);
    for (auto& n : negs) for (auto& x : n) x = g(rng);
    const auto r = call_pair_loss(u, v, negs);

    auto numeric = [&](Vec& target) {
      Vec out(s);
      for (std::size_t i = 0; i < s; ++i) {
        const double keep = target[i];
        target[i] = keep + h;
        const double up = direct_loss(u, v, negs);
        target[i] = keep - h;
        const double down = direct_loss(u, v, negs);
        target[i] = keep;
        out[i] = (up - down) / (2.0 * h);
      }
      return out;
    };
    CHECK(norm_rel_error(r.grad_center, numeric(u)) < 1e-5);
    CHECK(norm_rel_error(r.grad_context, numeric(v)) < 1e-5);
    REQUIRE(r.grad_negatives.size() == negs.size());
    for (std::size_t k = 0; k < negs.size(); ++k) CHECK(norm_rel_error(r.grad_negatives[k], numeric(negs[k])) < 1e-5);
  }
}

TEST_CASE("logistic helpers are overflow safe") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(1000.0) == 1.0);
  CHECK(sigmoid(-1000.0) >= 0.0);
  CHECK(log_sigmoid(-1000.0) == doctest::Approx(-1000.0));
  CHECK(log_sigmoid(1000.0) == doctest::Approx(0.0));
  CHECK(std::isfinite(log_sigmoid(-1e6)));
}

TEST_CASE("epoch loss strictly decreases on a fixed corpus") {
  const FixedCorpus f;
  EmbeddingConfig cfg;
  cfg.epochs = 5;
  const auto trained = train_skipgram(f.corpus, f.graph.vertex_count(), cfg);
  REQUIRE(trained.report.epoch_loss.size() == 5);
  for (std::size_t e = 1; e < 5; ++e) CHECK(trained.report.epoch_loss[e] < trained.report.epoch_loss[e - 1]);
  // Every pair within radius 5 of a 40-vertex walk.
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < 40; ++i) pairs += std::min<std::size_t>(i, 5) + std::min<std::size_t>(39 - i, 5);
  CHECK(trained.report.pairs_per_epoch == 100 * pairs);
}

TEST_CASE("a repeated pair pulls the two vectors together") {
  const auto corpus = corpus_of(std::vector<Walk>(200, Walk{0, 1}));
  std::vector<double> cos;
  EmbeddingConfig cfg;
  cfg.dimension = 16;
  cfg.epochs = 6;
  cfg.negatives = 2;
  cfg.on_epoch_end = [&](std::size_t, const EmbeddingTable& t) {
    REQUIRE(t.has_context());
    cos.push_back(cosine(t.row(0), t.context_row(1)));
  };
  train_skipgram(corpus, 2, cfg);
  REQUIRE(cos.size() == 6);
  for (std::size_t e = 1; e < cos.size(); ++e) CHECK(cos[e] > cos[e - 1]);
}

TEST_CASE("single worker training is bit reproducible") {
  const FixedCorpus f;
  EmbeddingConfig cfg;
  cfg.dimension = 20;
  const auto a = train_skipgram(f.corpus, f.graph.vertex_count(), cfg);
  const auto b = train_skipgram(f.corpus, f.graph.vertex_count(), cfg);
  CHECK(a.table == b.table);
  CHECK(a.report.epoch_loss == b.report.epoch_loss);
  cfg.seed = 7;
  CHECK_FALSE(train_skipgram(f.corpus, f.graph.vertex_count(), cfg).table == a.table);
}

TEST_CASE("two disconnected cliques separate") {
  // Vertices 0..5 and 6..11 each form a clique; walks never cross.
  std::mt19937_64 rng(3);
  std::vector<Walk> walks;
  for (int w = 0; w < 400; ++w) {
    const VertexIndex base = w % 2 ? 6 : 0;
    Walk walk = {base};
    for (int i = 1; i < 30; ++i) {
      VertexIndex next;
      do next = base + static_cast<VertexIndex>(rng() % 6); while (next == walk.back());
      walk.push_back(next);
    }
    walks.push_back(walk);
  }
  EmbeddingConfig cfg;
  cfg.dimension = 16;
  const auto t = train_skipgram(corpus_of(walks), 12, cfg).table;
  std::vector<std::pair<VertexIndex, VertexIndex>> intra, inter;
  for (VertexIndex a = 0; a < 12; ++a) {
    for (VertexIndex b = a + 1; b < 12; ++b) ((a < 6) == (b < 6) ? intra : inter).push_back({a, b});
  }
  CHECK(mean_cosine(t, intra) > mean_cosine(t, inter));
}

TEST_CASE("training on generated corpora stays finite") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto d = generate_synthetic({.users = 15, .tracks = 90, .artists = 6, .albums = 9, .tags = 8, .seed = seed});
    const auto g = build_hypergraph(d.interactions, d.catalog, d.tags);
    WalkConfig wc;
    wc.length = 80;
    wc.seed = seed;
    const auto trained = train_skipgram(generate_walks(g, wc), g.vertex_count(), EmbeddingConfig{});
    CHECK(trained.table.all_finite());
    CHECK(trained.table.rows() == g.vertex_count());
    CHECK(trained.table.dimension() == 50);
    for (double l : trained.report.epoch_loss) CHECK(std::isfinite(l));
  }
}

TEST_CASE("lock-free workers reach a comparable loss") {
  const auto d = generate_synthetic({.users = 20, .tracks = 120, .artists = 8, .albums = 12, .tags = 10, .seed = 4});
  const auto g = build_hypergraph(d.interactions, d.catalog, d.tags);
  WalkConfig wc;
  wc.length = 60;
  const auto corpus = generate_walks(g, wc);
  EmbeddingConfig cfg;
  const double single = train_skipgram(corpus, g.vertex_count(), cfg).report.epoch_loss.back();
  cfg.workers = 4;
  const auto multi = train_skipgram(corpus, g.vertex_count(), cfg);
  CHECK(multi.table.all_finite());
  CHECK(std::abs(multi.report.epoch_loss.back() - single) <= 0.10 * single);
}

TEST_CASE("training input validation") {
  EmbeddingConfig cfg;
  CHECK_THROWS_AS(train_skipgram(WalkCorpus{}, 3, cfg), ValidationError);
  CHECK_THROWS_AS(train_skipgram(corpus_of({{0, 5}}), 3, cfg), ValidationError);
  cfg.dimension = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = {};
  cfg.window = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = {};
  cfg.negatives = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("embedding files round trip and reject damage") {
  testing::TempDir dir;
  EmbeddingTable t(5, 50, 0xabcdef);
  std::mt19937_64 rng(1);
  for (double& x : t.input_data()) x = std::uniform_real_distribution<double>(-1, 1)(rng);
  const auto path = dir / "e.bin";
  save_embeddings(path, t);
  CHECK(load_embeddings(path) == t);
  CHECK(load_embeddings(path, 0xabcdef) == t);
  CHECK_THROWS_AS(load_embeddings(path, 0x1234), FingerprintError);

  const std::string bytes = testing::read_text(path);
  testing::write_text(dir / "short.bin", bytes.substr(0, bytes.size() - 8));
  CHECK_THROWS_AS(load_embeddings(dir / "short.bin"), FormatError);
  testing::write_text(dir / "head.bin", bytes.substr(0, 10));
  CHECK_THROWS_AS(load_embeddings(dir / "head.bin"), FormatError);
  testing::write_text(dir / "magic.bin", "NOTEMBED" + bytes.substr(8));
  CHECK_THROWS_AS(load_embeddings(dir / "magic.bin"), FormatError);
  CHECK_THROWS_AS(load_embeddings(dir / "missing.bin"), IoError);
}

TEST_CASE("text export round trips and checks row width") {
  EmbeddingTable t(2, 3, 9);
  t.input_data() = {0.1, -2.5, 3.0, 1e-300, 0.0, -7.25};
  std::stringstream buf;
  const std::vector<std::string> keys = {"user:u1", "track:t1"};
  export_embeddings_text(buf, t, keys);
  const auto back = import_embeddings_text(buf);
  CHECK(back.table == t);
  CHECK(back.keys == keys);

  std::string row = "1 50 0\nk";
  for (int i = 0; i < 49; ++i) row += " 0.5";
  std::istringstream short_row(row + "\n");
  CHECK_THROWS_AS(import_embeddings_text(short_row), Error);
}
