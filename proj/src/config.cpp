#include "hyperrec/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "hyperrec/error.hpp"

namespace hyperrec {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_value(std::string_view key, std::string_view text) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ValidationError("config key '" + std::string(key) + "': cannot parse '" + std::string(text) + "'");
  }
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ValidationError("config key '" + std::string(key) + "': expected a boolean, got '" + std::string(text) + "'");
}

std::string str(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

}  // namespace

std::string_view to_string(Method m) { return m == Method::kHypergraph ? "dwhrec" : "popularity"; }

Method parse_method(std::string_view text) {
  if (text == "dwhrec") return Method::kHypergraph;
  if (text == "popularity" || text == "pb") return Method::kPopularity;
  throw ValidationError("unknown method '" + std::string(text) + "' (expected dwhrec or popularity)");
}

std::vector<std::size_t> parse_size_list(std::string_view text) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    const auto item = trim(text.substr(start, comma - start));
    if (item.empty()) throw ValidationError("empty entry in list '" + std::string(text) + "'");
    out.push_back(parse_value<std::size_t>("list", item));
    start = comma + 1;
  }
  return out;
}

PipelineConfig::PipelineConfig() { ranker.n = max_n(); }

void PipelineConfig::set(std::string_view key, std::string_view raw) {
  const std::string_view value = trim(raw);
  auto size = [&] { return parse_value<std::size_t>(key, value); };
  auto u64 = [&] { return parse_value<std::uint64_t>(key, value); };
  auto real = [&] { return parse_value<double>(key, value); };

  if (key == "dataset.dir") {
    const std::filesystem::path dir(value);
    data = {dir / "interactions.tsv", dir / "catalog.tsv", dir / "tags.tsv"};
  } else if (key == "dataset.interactions") {
    data.interactions = value;
  } else if (key == "dataset.catalog") {
    data.catalog = value;
  } else if (key == "dataset.tags") {
    data.tags = value;
  } else if (key == "dataset.top_k") {
    top_k = size();
  } else if (key == "split.ratio") {
    split.train_ratio = real();
  } else if (key == "split.folds") {
    split.folds = size();
  } else if (key == "split.fold") {
    split.fold_index = size();
  } else if (key == "split.seed") {
    split.seed = u64();
  } else if (key == "walk.iterations") {
    walk.iterations = size();
  } else if (key == "walk.length") {
    walk.length = size();
  } else if (key == "walk.stay_probability") {
    walk.stay_probability = real();
  } else if (key == "walk.seed") {
    walk.seed = u64();
  } else if (key == "embedding.dim") {
    embedding.dimension = size();
  } else if (key == "embedding.window") {
    embedding.window = size();
  } else if (key == "embedding.negatives") {
    embedding.negatives = size();
  } else if (key == "embedding.epochs") {
    embedding.epochs = size();
  } else if (key == "embedding.learning_rate") {
    embedding.learning_rate = real();
  } else if (key == "embedding.seed") {
    embedding.seed = u64();
  } else if (key == "embedding.subsample") {
    embedding.subsample = parse_bool(key, value);
  } else if (key == "embedding.workers") {
    embedding.workers = size();
  } else if (key == "ranker.n") {
    ns = parse_size_list(value);
    ranker.n = max_n();
  } else if (key == "ranker.mode") {
    ranker.mode = parse_rank_mode(value);
  } else if (key == "ranker.alpha") {
    if (value == "adaptive") {
      ranker.alpha.reset();
    } else {
      ranker.alpha = real();
    }
  } else if (key == "ranker.similarity") {
    ranker.similarity = parse_similarity(value);
  } else if (key == "graph.disable") {
    const auto off = EdgeKindSet::parse(value);
    if (off.contains(EdgeKind::kUserTrack)) throw ValidationError("config key 'graph.disable': e1 cannot be disabled");
    edges = EdgeKindSet::all();
    for (auto k : {EdgeKind::kTagTrack, EdgeKind::kAlbumTrack, EdgeKind::kArtistTrack}) {
      if (off.contains(k)) edges = edges.without(k);
    }
  } else if (key == "seed") {
    const auto s = u64();
    split.seed = walk.seed = embedding.seed = s;
  } else if (key == "threads") {
    threads = std::max<std::size_t>(1, size());
    walk.threads = threads;
  } else if (key == "method") {
    method = parse_method(value);
  } else if (key == "out") {
    out = value;
  } else {
    throw ValidationError("unknown config key '" + std::string(key) + "'");
  }
}

void PipelineConfig::load(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw ParseError(source, number, "expected key = value");
    const auto key = trim(s.substr(0, eq));
    if (key.empty()) throw ParseError(source, number, "empty key");
    try {
      set(key, s.substr(eq + 1));
    } catch (const ValidationError& e) {
      throw ValidationError(source + ":" + std::to_string(number) + ": " + e.what());
    }
  }
}

void PipelineConfig::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  load(in, path.string());
}

void PipelineConfig::require_dataset() const {
  if (data.interactions.empty()) throw ValidationError("missing required config key 'dataset.interactions'");
  if (data.catalog.empty()) throw ValidationError("missing required config key 'dataset.catalog'");
  if (data.tags.empty()) throw ValidationError("missing required config key 'dataset.tags'");
}

void PipelineConfig::validate() const {
  if (top_k == 0) throw ValidationError("dataset.top_k must be >= 1");
  split.validate();
  walk.validate();
  embedding.validate();
  if (ns.empty()) throw ValidationError("ranker.n needs at least one value");
  if (std::find(ns.begin(), ns.end(), std::size_t{0}) != ns.end()) throw ValidationError("ranker.n values must be >= 1");
  RankerConfig r = ranker;
  r.n = max_n();
  r.validate();
}

std::size_t PipelineConfig::max_n() const { return ns.empty() ? 0 : *std::max_element(ns.begin(), ns.end()); }

std::vector<std::pair<std::string, std::string>> PipelineConfig::describe() const {
  std::string n_list;
  for (std::size_t n : ns) n_list += (n_list.empty() ? "" : ",") + std::to_string(n);
  return {
      {"dataset.top_k", std::to_string(top_k)},
      {"split.ratio", str(split.train_ratio)},
      {"split.folds", std::to_string(split.folds)},
      {"split.seed", std::to_string(split.seed)},
      {"walk.iterations", std::to_string(walk.iterations)},
      {"walk.length", std::to_string(walk.length)},
      {"walk.stay_probability", str(walk.stay_probability)},
      {"walk.seed", std::to_string(walk.seed)},
      {"embedding.dim", std::to_string(embedding.dimension)},
      {"embedding.window", std::to_string(embedding.window)},
      {"embedding.negatives", std::to_string(embedding.negatives)},
      {"embedding.epochs", std::to_string(embedding.epochs)},
      {"embedding.learning_rate", str(embedding.learning_rate)},
      {"embedding.seed", std::to_string(embedding.seed)},
      {"embedding.workers", std::to_string(embedding.workers)},
      {"ranker.n", n_list},
      {"ranker.mode", std::string(to_string(ranker.mode))},
      {"ranker.alpha", ranker.alpha ? str(*ranker.alpha) : "adaptive"},
      {"ranker.similarity", std::string(to_string(ranker.similarity))},
      {"graph.edges", edges.to_string()},
      {"method", std::string(to_string(method))},
  };
}

}  // namespace hyperrec
