#include "hyperrec/walker.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "hyperrec/error.hpp"

namespace hyperrec {

namespace {

// Transition from the vertex sitting at `at` (edge, slot).
Incidence advance(const Hypergraph& g, VertexIndex current, Incidence at, double stay, Engine& rng) {
  if (uniform01(rng) >= stay) {
    const auto incs = g.incident(current);
    at = incs[uniform_below(rng, incs.size())];
  }
  const auto cum = g.slot_cumulative(at.edge);
  const double before = at.slot == 0 ? 0.0 : cum[at.slot - 1];
  const double own = g.slot_weight(at.edge, at.slot);
  const double total = cum.back() - own;
  if (cum.size() < 2 || !(total > 0.0)) {
    throw Error(ErrorKind::kInternal, "degenerate hyperedge " + std::to_string(at.edge));
  }
  double x = uniform01(rng) * total;
  if (x >= before) x += own;
  auto slot = static_cast<std::uint32_t>(std::upper_bound(cum.begin(), cum.end(), x) - cum.begin());
  if (slot >= cum.size()) slot = static_cast<std::uint32_t>(cum.size() - 1);
  if (slot == at.slot) slot = slot + 1 < cum.size() ? slot + 1 : slot - 1;  // boundary round-off
  return Incidence{at.edge, slot};
}

Incidence locate(const Hypergraph& g, VertexIndex v, EdgeIndex e) {
  for (const auto& inc : g.incident(v)) {
    if (inc.edge == e) return inc;
  }
  throw ValidationError("vertex " + std::to_string(v) + " is not in edge " + std::to_string(e));
}

void run_walk(const Hypergraph& g, VertexIndex start, std::size_t iteration, const WalkConfig& cfg, Walk& out) {
  auto rng = make_engine({cfg.seed, start, iteration});
  out.clear();
  out.reserve(cfg.length);
  const auto incs = g.incident(start);
  Incidence at = incs[uniform_below(rng, incs.size())];
  VertexIndex v = start;
  out.push_back(v);
  while (out.size() < cfg.length) {
    at = advance(g, v, at, cfg.stay_probability, rng);
    v = g.slot_vertices(at.edge)[at.slot];
    out.push_back(v);
  }
}

std::string kinds_to_string(const std::bitset<kVertexKindCount>& kinds) {
  std::string s;
  for (std::size_t k = 0; k < kVertexKindCount; ++k) {
    if (!kinds.test(k)) continue;
    if (!s.empty()) s += ',';
    s += to_string(static_cast<VertexKind>(k));
  }
  return s;
}

std::bitset<kVertexKindCount> kinds_from_string(const std::string& s, const std::string& source) {
  std::bitset<kVertexKindCount> kinds;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    bool found = false;
    for (std::size_t k = 0; k < kVertexKindCount; ++k) {
      if (item == to_string(static_cast<VertexKind>(k))) {
        kinds.set(k);
        found = true;
      }
    }
    if (!found) throw FormatError(source + ": unknown vertex kind '" + item + "' in header");
  }
  return kinds;
}

template <typename T>
T parse_number(const std::string& text, const std::string& what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw FormatError("bad " + what + " value '" + text + "'");
  }
  return value;
}

std::uint64_t parse_hex(const std::string& text) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value, 16);
  if (ec != std::errc() || ptr != text.data() + text.size()) throw FormatError("bad fingerprint '" + text + "'");
  return value;
}

std::string to_hex(std::uint64_t x) {
  char buf[17];
  const auto [ptr, ec] = std::to_chars(buf, buf + 16, x, 16);
  std::string s(buf, ptr);
  return std::string(16 - s.size(), '0') + s;
}

std::string shortest(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

}  // namespace

void WalkConfig::validate() const {
  if (iterations == 0) throw ValidationError("walk iterations must be >= 1");
  if (length == 0) throw ValidationError("walk length must be >= 1");
  if (!(stay_probability >= 0.0 && stay_probability <= 1.0)) {
    throw ValidationError("stay probability must lie in [0, 1]");
  }
}

std::size_t WalkCorpus::token_count() const {
  std::size_t n = 0;
  for (const auto& w : walks) n += w.size();
  return n;
}

StepResult step(const Hypergraph& g, VertexIndex current, EdgeIndex current_edge, double stay_probability,
                Engine& rng) {
  const Incidence next = advance(g, current, locate(g, current, current_edge), stay_probability, rng);
  return {g.slot_vertices(next.edge)[next.slot], next.edge};
}

WalkCorpus generate_walks(const Hypergraph& g, const WalkConfig& config) {
  config.validate();
  WalkCorpus corpus;
  corpus.graph_fingerprint = g.fingerprint();
  corpus.config = config;

  std::vector<VertexIndex> starts;
  for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
    if (!config.start_kinds.test(static_cast<std::size_t>(g.vertex(v).kind))) continue;
    if (g.incident(v).empty()) {
      corpus.skipped.push_back(v);
      continue;
    }
    starts.push_back(v);
  }

  const std::size_t r = config.iterations;
  corpus.walks.resize(starts.size() * r);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t task = next++; task < corpus.walks.size(); task = next++) {
      run_walk(g, starts[task / r], task % r, config, corpus.walks[task]);
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(config.threads, 1, std::max<std::size_t>(corpus.walks.size(), 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return corpus;
}

bool co_occur(const Hypergraph& g, VertexIndex a, VertexIndex b) {
  const auto ia = g.incident(a);
  const auto ib = g.incident(b);
  auto x = ia.begin();
  auto y = ib.begin();
  while (x != ia.end() && y != ib.end()) {
    if (x->edge == y->edge) return true;
    if (x->edge < y->edge) ++x; else ++y;
  }
  return false;
}

WalkCheck check_walks(const Hypergraph& g, const WalkCorpus& corpus) {
  WalkCheck check;
  for (const auto& walk : corpus.walks) {
    for (std::size_t i = 1; i < walk.size(); ++i) {
      ++check.transitions;
      const bool ok = walk[i] != walk[i - 1] && walk[i] < g.vertex_count() && walk[i - 1] < g.vertex_count() &&
                      co_occur(g, walk[i - 1], walk[i]);
      if (!ok) ++check.violations;
    }
  }
  return check;
}

void write_corpus(std::ostream& out, const WalkCorpus& corpus) {
  const auto& c = corpus.config;
  out << "#hyperrec-walks v1 fingerprint=" << to_hex(corpus.graph_fingerprint) << " iterations=" << c.iterations
      << " length=" << c.length << " stay=" << shortest(c.stay_probability) << " seed=" << c.seed
      << " start_kinds=" << kinds_to_string(c.start_kinds) << " walks=" << corpus.walks.size() << '\n';
  std::string line;
  char buf[16];
  for (const auto& walk : corpus.walks) {
    line.clear();
    for (std::size_t i = 0; i < walk.size(); ++i) {
      if (i) line += ' ';
      const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, walk[i]);
      line.append(buf, ptr);
    }
    line += '\n';
    out << line;
  }
}

void write_corpus(const std::filesystem::path& path, const WalkCorpus& corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_corpus(out, corpus);
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

WalkCorpus read_corpus(std::istream& in, const std::string& source) {
  std::string header;
  if (!std::getline(in, header) || header.rfind("#hyperrec-walks v1", 0) != 0) {
    throw FormatError(source + ": missing walk corpus header");
  }
  std::map<std::string, std::string> fields;
  {
    std::istringstream hs(header.substr(std::string("#hyperrec-walks v1").size()));
    std::string tok;
    while (hs >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) throw FormatError(source + ": bad header token '" + tok + "'");
      fields[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
  }
  auto field = [&](const char* key) -> const std::string& {
    const auto it = fields.find(key);
    if (it == fields.end()) throw FormatError(source + ": header lacks '" + key + "'");
    return it->second;
  };

  WalkCorpus corpus;
  corpus.graph_fingerprint = parse_hex(field("fingerprint"));
  corpus.config.iterations = parse_number<std::size_t>(field("iterations"), "iterations");
  corpus.config.length = parse_number<std::size_t>(field("length"), "length");
  corpus.config.stay_probability = parse_number<double>(field("stay"), "stay");
  corpus.config.seed = parse_number<std::uint64_t>(field("seed"), "seed");
  corpus.config.start_kinds = kinds_from_string(field("start_kinds"), source);
  const auto expected = parse_number<std::size_t>(field("walks"), "walks");

  std::string line;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    Walk walk;
    const char* p = line.data();
    const char* end = p + line.size();
    while (p < end) {
      if (*p == ' ') { ++p; continue; }
      VertexIndex v = 0;
      const auto [ptr, ec] = std::from_chars(p, end, v);
      if (ec != std::errc()) throw FormatError(source + ":" + std::to_string(number) + ": bad vertex index");
      walk.push_back(v);
      p = ptr;
    }
    corpus.walks.push_back(std::move(walk));
  }
  if (corpus.walks.size() != expected) {
    throw FormatError(source + ": header promises " + std::to_string(expected) + " walks, found " +
                      std::to_string(corpus.walks.size()));
  }
  return corpus;
}

WalkCorpus read_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_corpus(in, path.string());
}

}  // namespace hyperrec
