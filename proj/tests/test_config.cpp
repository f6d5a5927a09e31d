#include <doctest.h>

#include <sstream>

#include "hyperrec/config.hpp"
#include "hyperrec/error.hpp"

using namespace hyperrec;

TEST_CASE("defaults follow the published settings") {
  const PipelineConfig c;
  CHECK(c.top_k == 200);
  CHECK(c.split.train_ratio == 0.9);
  CHECK(c.split.folds == 10);
  CHECK(c.walk.iterations == 5);
  CHECK(c.walk.length == 200);
  CHECK(c.walk.stay_probability == 0.5);
  CHECK(c.embedding.dimension == 50);
  CHECK(c.embedding.window == 5);
  CHECK(c.embedding.negatives == 5);
  CHECK(c.embedding.epochs == 5);
  CHECK(c.embedding.learning_rate == 0.025);
  CHECK(c.ns == std::vector<std::size_t>{10, 20, 30, 40, 50, 60, 70, 80, 90, 100});
  CHECK(c.ranker.mode == RankMode::kMmrGreedy);
  CHECK_FALSE(c.ranker.alpha.has_value());
  CHECK(c.edges == EdgeKindSet::all());
  CHECK(c.max_n() == 100);
}

TEST_CASE("config text sets dotted keys") {
  PipelineConfig c;
  std::istringstream in(
      "# walk settings\n"
      "walk.iterations = 3\n"
      "walk.length=40   # trailing comment\n"
      "\n"
      "ranker.n = 5, 15\n"
      "ranker.alpha = 0.25\n"
      "graph.disable = e3\n"
      "seed = 99\n");
  c.load(in, "test.conf");
  CHECK(c.walk.iterations == 3);
  CHECK(c.walk.length == 40);
  CHECK(c.ns == std::vector<std::size_t>{5, 15});
  CHECK(c.ranker.alpha == std::optional<double>(0.25));
  CHECK_FALSE(c.edges.contains(EdgeKind::kAlbumTrack));
  CHECK(c.edges.contains(EdgeKind::kTagTrack));
  CHECK(c.split.seed == 99);
  CHECK(c.walk.seed == 99);
  CHECK(c.embedding.seed == 99);
  c.set("ranker.alpha", "adaptive");
  CHECK_FALSE(c.ranker.alpha.has_value());
}

TEST_CASE("unknown or malformed keys name the culprit") {
  PipelineConfig c;
  try {
    c.set("walk.lenght", "3");
    FAIL("expected failure");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("walk.lenght") != std::string::npos);
  }
  CHECK_THROWS_AS(c.set("walk.length", "three"), ValidationError);
  CHECK_THROWS_AS(c.set("graph.disable", "e1"), ValidationError);
  std::istringstream no_eq("walk.length 3\n");
  CHECK_THROWS_AS(c.load(no_eq, "x"), ParseError);
  std::istringstream bad_line("walk.length = 3\nbogus = 1\n");
  try {
    c.load(bad_line, "x.conf");
    FAIL("expected failure");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("x.conf:2") != std::string::npos);
  }
}

TEST_CASE("missing dataset key is named") {
  PipelineConfig c;
  try {
    c.require_dataset();
    FAIL("expected failure");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("dataset.interactions") != std::string::npos);
  }
  c.set("dataset.dir", "/data");
  CHECK_NOTHROW(c.require_dataset());
  CHECK(c.data.tags == std::filesystem::path("/data/tags.tsv"));
}

TEST_CASE("validation catches bad values") {
  PipelineConfig c;
  c.set("walk.stay_probability", "1.2");
  CHECK_THROWS_AS(c.validate(), ValidationError);
  PipelineConfig d;
  CHECK_THROWS_AS(d.set("ranker.n", "10,,20"), ValidationError);
  d.set("ranker.n", "0");
  CHECK_THROWS_AS(d.validate(), ValidationError);
  CHECK_THROWS_AS(parse_method("bpr"), ValidationError);
}

TEST_CASE("describe lists every knob") {
  const auto rows = PipelineConfig{}.describe();
  bool has_mode = false;
  for (const auto& [k, v] : rows) has_mode = has_mode || (k == "ranker.mode" && v == "mmr_greedy");
  CHECK(has_mode);
}
