#include "hyperrec/embedding.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>
#include <utility>

#include "hyperrec/alias_table.hpp"
#include "hyperrec/error.hpp"

namespace hyperrec {

static_assert(std::endian::native == std::endian::little, "embedding files assume a little-endian host");

EmbeddingTable::EmbeddingTable(std::size_t rows, std::size_t dimension, std::uint64_t fingerprint)
    : rows_(rows), dimension_(dimension), fingerprint_(fingerprint), input_(rows * dimension, 0.0) {}

bool EmbeddingTable::all_finite() const {
  const auto finite = [](double x) { return std::isfinite(x); };
  return std::all_of(input_.begin(), input_.end(), finite) && std::all_of(context_.begin(), context_.end(), finite);
}

void EmbeddingConfig::validate() const {
  if (dimension == 0) throw ValidationError("embedding dimension must be >= 1");
  if (window == 0) throw ValidationError("embedding window must be >= 1");
  if (negatives == 0) throw ValidationError("negative samples must be >= 1");
  if (epochs == 0) throw ValidationError("epochs must be >= 1");
  if (!(learning_rate > 0.0)) throw ValidationError("learning rate must be positive");
  if (subsample && !(subsample_threshold > 0.0)) throw ValidationError("subsample threshold must be positive");
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log_sigmoid(double x) {
  // log sigma(x) = -softplus(-x)
  if (x >= 0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

PairLoss sgns_pair_loss(std::span<const double> center, std::span<const double> context,
                        std::span<const std::span<const double>> negatives) {
  const std::size_t s = center.size();
  if (context.size() != s) throw ValidationError("context vector dimension mismatch");
  auto dot = [s](std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < s; ++i) acc += a[i] * b[i];
    return acc;
  };

  PairLoss out;
  out.grad_center.assign(s, 0.0);
  out.grad_context.assign(s, 0.0);
  const double pos = dot(center, context);
  out.loss = -log_sigmoid(pos);
  // d/dx [-log sigma(x)] = sigma(x) - 1
  const double gp = sigmoid(pos) - 1.0;
  for (std::size_t i = 0; i < s; ++i) {
    out.grad_center[i] += gp * context[i];
    out.grad_context[i] = gp * center[i];
  }
  for (const auto& neg : negatives) {
    if (neg.size() != s) throw ValidationError("negative vector dimension mismatch");
    const double f = dot(center, neg);
    out.loss -= log_sigmoid(-f);
    // d/dx [-log sigma(-x)] = sigma(x)
    const double gn = sigmoid(f);
    std::vector<double> g(s);
    for (std::size_t i = 0; i < s; ++i) {
      out.grad_center[i] += gn * neg[i];
      g[i] = gn * center[i];
    }
    out.grad_negatives.push_back(std::move(g));
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Training state is kept in single precision, as in the reference word2vec
// tool; the finished table is widened to double.
using Real = float;

// Plain access for the single-worker path; relaxed atomics when workers
// share the tables (lock-free, races tolerated, no undefined behaviour).
template <bool Shared>
struct Cell {
  static Real load(Real& x) {
    if constexpr (Shared) return std::atomic_ref<Real>(x).load(std::memory_order_relaxed);
    else return x;
  }
  static void store(Real& x, Real v) {
    if constexpr (Shared) std::atomic_ref<Real>(x).store(v, std::memory_order_relaxed);
    else x = v;
  }
};

// sigma(x) and -log sigma(x) by linear interpolation on a fine grid;
// absolute error below 1e-7. Both values of a grid point share one
// cache line. The rare tails are computed exactly.
class LogisticTable {
 public:
  LogisticTable() : grid_(kSize + 1) {
    for (std::size_t i = 0; i <= kSize; ++i) {
      const double x = -kRange + static_cast<double>(i) / kScale;
      grid_[i] = {sigmoid(x), -log_sigmoid(x)};
    }
  }

  [[gnu::always_inline]] std::pair<double, double> operator()(double x) const {
    if (!(x > -kRange) || !(x < kRange)) return {sigmoid(x), -log_sigmoid(x)};
    const double pos = (x + kRange) * kScale;
    const auto i = static_cast<std::size_t>(pos);
    const double t = pos - static_cast<double>(i);
    const Point& a = grid_[i];
    const Point& b = grid_[i + 1];
    return {a.sig + t * (b.sig - a.sig), a.nls + t * (b.nls - a.nls)};
  }

 private:
  struct Point {
    double sig;
    double nls;
  };
  static constexpr double kRange = 16.0;
  static constexpr double kScale = 1024.0;
  static constexpr std::size_t kSize = static_cast<std::size_t>(2 * kRange * kScale);
  std::vector<Point> grid_;
};

const LogisticTable kLogistic;

#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wpsabi"

// Eight-lane vectors; the compiler splits them where the target is narrower.
// Training rows are padded to a whole number of vectors with zeros, which
// stay zero under every update.
using Lanes = Real __attribute__((vector_size(8 * sizeof(Real))));
constexpr std::size_t kLanes = 8;

inline Lanes load_lanes(const Real* p) {
  Lanes x;
  std::memcpy(&x, p, sizeof x);
  return x;
}

inline void store_lanes(Real* p, Lanes x) { std::memcpy(p, &x, sizeof x); }

using LaneMask = std::int32_t __attribute__((vector_size(8 * sizeof(std::int32_t))));

// Folds halves, then pairs, then neighbours with whole-vector shuffles;
// extracting lanes one by one costs several times as many instructions.
[[gnu::always_inline]] inline double hsum(Lanes a) {
  a += __builtin_shuffle(a, LaneMask{4, 5, 6, 7, 0, 1, 2, 3});
  a += __builtin_shuffle(a, LaneMask{2, 3, 0, 1, 6, 7, 4, 5});
  a += __builtin_shuffle(a, LaneMask{1, 0, 3, 2, 5, 4, 7, 6});
  return a[0];
}

// Loss of one pair from its dot products (target 0 is the positive) and
// each target's scaled gradient.
[[gnu::always_inline]] inline double logistic_grads(const double* f, std::size_t count, double lr, Real* g) {
  double loss = 0.0;
  for (std::size_t t = 0; t < count; ++t) {
    const auto [sig, softplus_neg] = kLogistic(f[t]);  // sigma(f), -log sigma(f)
    const bool positive = t == 0;
    loss += positive ? softplus_neg : softplus_neg + f[t];  // -log sigma(-f) = -log sigma(f) + f
    g[t] = static_cast<Real>(((positive ? 1.0 : 0.0) - sig) * lr);
  }
  return loss;
}

// One SGD step for a pair: all dot products first, then target rows move
// by g[t] * u and u by sum g[t] * v_t (taken before the rows change).
// N targets and S vectors per row are compile-time so every loop unrolls
// and u, the accumulators and the gradients stay in registers.
template <std::size_t N, std::size_t S>
[[gnu::always_inline]] inline double step_fixed(Real* __restrict u, Real* const* targets, double lr) {
  Lanes uk[S];
  Real* rows[N];
  Lanes acc[N];
#pragma GCC unroll 8
  for (std::size_t k = 0; k < S; ++k) uk[k] = load_lanes(u + k * kLanes);
#pragma GCC unroll 8
  for (std::size_t t = 0; t < N; ++t) {
    rows[t] = targets[t];
    acc[t] = Lanes{};
  }
#pragma GCC unroll 8
  for (std::size_t k = 0; k < S; ++k) {
#pragma GCC unroll 8
    for (std::size_t t = 0; t < N; ++t) acc[t] += uk[k] * load_lanes(rows[t] + k * kLanes);
  }
  double f[N];
#pragma GCC unroll 8
  for (std::size_t t = 0; t < N; ++t) f[t] = hsum(acc[t]);
  Real g[N];
  const double loss = logistic_grads(f, N, lr, g);
#pragma GCC unroll 8
  for (std::size_t k = 0; k < S; ++k) {
    Lanes e{};
#pragma GCC unroll 8
    for (std::size_t t = 0; t < N; ++t) {
      const Lanes vk = load_lanes(rows[t] + k * kLanes);
      e += g[t] * vk;
      store_lanes(rows[t] + k * kLanes, vk + g[t] * uk[k]);
    }
    store_lanes(u + k * kLanes, uk[k] + e);
  }
  return loss;
}

// Same step with run-time sizes; `f` and `g` hold `count` entries.
[[gnu::always_inline]] inline double step_any(Real* __restrict u, Real* const* targets, std::size_t count,
                                              std::size_t stride, double lr, double* f, Real* g) {
  for (std::size_t t = 0; t < count; ++t) {
    Lanes acc{};
    for (std::size_t k = 0; k < stride; k += kLanes) acc += load_lanes(u + k) * load_lanes(targets[t] + k);
    f[t] = hsum(acc);
  }
  const double loss = logistic_grads(f, count, lr, g);
  for (std::size_t k = 0; k < stride; k += kLanes) {
    const Lanes uk = load_lanes(u + k);
    Lanes e{};
    for (std::size_t t = 0; t < count; ++t) {
      const Lanes vk = load_lanes(targets[t] + k);
      e += g[t] * vk;
      store_lanes(targets[t] + k, vk + g[t] * uk);
    }
    store_lanes(u + k, uk + e);
  }
  return loss;
}

constexpr std::size_t kMaxFixed = 8;

template <std::size_t N, std::size_t... S>
[[gnu::always_inline]] inline bool step_rows(Real* u, Real* const* targets, std::size_t chunks, double lr,
                                             double& loss, std::index_sequence<S...>) {
  return ((chunks == S + 1 ? (loss = step_fixed<N, S + 1>(u, targets, lr), true) : false) || ...);
}

template <std::size_t... N>
[[gnu::always_inline]] inline bool step_targets(Real* u, Real* const* targets, std::size_t count, std::size_t chunks,
                                                double lr, double& loss, std::index_sequence<N...>) {
  return ((count == N + 1 ? step_rows<N + 1>(u, targets, chunks, lr, loss, std::make_index_sequence<kMaxFixed>{})
                          : false) ||
          ...);
}

// Cloned for AVX2 where the CPU has it. Up to kMaxFixed targets and
// kMaxFixed vectors per row (dimension 64) take the unrolled path.
__attribute__((target_clones("arch=haswell", "default")))
double sgd_step(Real* u, Real* const* targets, std::size_t count, std::size_t stride, double lr, double* f, Real* g) {
  double loss = 0.0;
  if (step_targets(u, targets, count, stride / kLanes, lr, loss, std::make_index_sequence<kMaxFixed>{})) return loss;
  return step_any(u, targets, count, stride, lr, f, g);
}

#pragma GCC diagnostic pop

struct TrainState {
  std::size_t dimension;
  std::size_t stride;  // dimension rounded up to whole vectors
  std::vector<Real> input;
  std::vector<Real> context;

  TrainState(std::size_t rows, std::size_t dim)
      : dimension(dim), stride((dim + kLanes - 1) / kLanes * kLanes),
        input(rows * stride, Real{0}), context(rows * stride, Real{0}) {}

  Real* input_row(VertexIndex v) { return input.data() + v * stride; }
  Real* context_row(VertexIndex v) { return context.data() + v * stride; }

  void export_to(EmbeddingTable& table) const {
    auto& in = table.input_data();
    auto& out = table.context_data();
    out.resize(in.size());
    for (std::size_t r = 0; r < table.rows(); ++r) {
      for (std::size_t k = 0; k < dimension; ++k) {
        in[r * dimension + k] = input[r * stride + k];
        out[r * dimension + k] = context[r * stride + k];
      }
    }
  }
};

struct TrainContext {
  const EmbeddingConfig& config;
  const AliasTable& noise;
  const std::vector<VertexIndex>& noise_vertex;
  const std::vector<double>& keep_probability;  // empty without subsampling
  double total_pairs;
};

struct Progress {
  std::atomic<std::size_t> shared{0};
  static constexpr std::size_t kFlush = 4096;
};

template <bool Shared>
class Worker {
 public:
  Worker(TrainState& state, const TrainContext& ctx, Progress& progress, FastEngine rng)
      : state_(state), ctx_(ctx), progress_(progress), rng_(std::move(rng)),
        neu1e_(state.stride), center_(state.stride), targets_(ctx.config.negatives + 1),
        dots_(ctx.config.negatives + 1), grads_(ctx.config.negatives + 1) {}

  // Trains over the walks; returns (loss sum, pair count).
  std::pair<double, std::size_t> run(std::span<const Walk> walks) {
    double loss = 0.0;
    std::size_t pairs = 0;
    std::vector<VertexIndex> kept;
    const std::size_t w = ctx_.config.window;
    for (const auto& walk : walks) {
      std::span<const VertexIndex> sentence = walk;
      if (!ctx_.keep_probability.empty()) {
        kept.clear();
        for (VertexIndex v : walk) {
          if (uniform01(rng_) < ctx_.keep_probability[v]) kept.push_back(v);
        }
        sentence = kept;
      }
      const std::size_t n = sentence.size();
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= w ? i - w : 0;
        const std::size_t hi = std::min(n - 1, i + w);
        for (std::size_t j = lo; j <= hi; ++j) {
          if (j == i) continue;
          loss += train_pair(sentence[i], sentence[j]);
          ++pairs;
          if (++unflushed_ == Progress::kFlush) flush();
        }
      }
    }
    flush();
    return {loss, pairs};
  }

 private:
  using C = Cell<Shared>;

  void flush() {
    done_ = progress_.shared.fetch_add(unflushed_, std::memory_order_relaxed) + unflushed_;
    unflushed_ = 0;
    const double frac = static_cast<double>(done_) / ctx_.total_pairs;
    lr_ = ctx_.config.learning_rate * std::max(1e-4, 1.0 - frac);
  }

  double train_pair(VertexIndex center, VertexIndex context) {
    if constexpr (!Shared) {
      std::size_t count = 0;
      targets_[count++] = state_.context_row(context);
      for (std::size_t d = 0; d < ctx_.config.negatives; ++d) {
        const VertexIndex neg = ctx_.noise_vertex[ctx_.noise.sample(rng_)];
        if (neg != context) targets_[count++] = state_.context_row(neg);
      }
      return sgd_step(state_.input_row(center), targets_.data(), count, state_.stride, lr_, dots_.data(),
                      grads_.data());
    }
    const std::size_t s = state_.dimension;
    Real* u = state_.input_row(center);
    Real* c = center_.data();
    for (std::size_t k = 0; k < s; ++k) c[k] = C::load(u[k]);
    std::fill(neu1e_.begin(), neu1e_.end(), Real{0});
    double loss = update(context, true);
    for (std::size_t d = 0; d < ctx_.config.negatives; ++d) {
      const VertexIndex neg = ctx_.noise_vertex[ctx_.noise.sample(rng_)];
      if (neg == context) continue;
      loss += update(neg, false);
    }
    const Real* e = neu1e_.data();
    for (std::size_t k = 0; k < s; ++k) C::store(u[k], C::load(u[k]) + e[k]);
    return loss;
  }

  // One logistic term against output row `target` with relaxed access;
  // returns its loss.
  double update(VertexIndex target, bool positive) {
    const std::size_t s = state_.dimension;
    Real* v = state_.context_row(target);
    const Real* c = center_.data();
    Real* e = neu1e_.data();
    double f = 0.0;
    for (std::size_t k = 0; k < s; ++k) f += c[k] * C::load(v[k]);
    const auto [sig, softplus_neg] = kLogistic(f);
    const auto g = static_cast<Real>(((positive ? 1.0 : 0.0) - sig) * lr_);
    for (std::size_t k = 0; k < s; ++k) {
      const Real vk = C::load(v[k]);
      e[k] += g * vk;
      C::store(v[k], vk + g * c[k]);
    }
    return positive ? softplus_neg : softplus_neg + f;
  }

  TrainState& state_;
  const TrainContext& ctx_;
  Progress& progress_;
  FastEngine rng_;
  std::vector<Real> neu1e_;
  std::vector<Real> center_;
  std::vector<Real*> targets_;
  std::vector<double> dots_;
  std::vector<Real> grads_;
  std::size_t unflushed_ = 0;
  std::size_t done_ = 0;
  double lr_ = ctx_.config.learning_rate;
};

}  // namespace

TrainedEmbedding train_skipgram(const WalkCorpus& corpus, std::size_t vertex_count, const EmbeddingConfig& config) {
  config.validate();
  if (corpus.walks.empty() || corpus.token_count() == 0) {
    throw ValidationError("cannot train embeddings on an empty corpus");
  }

  std::vector<std::uint64_t> counts(vertex_count, 0);
  std::size_t pairs_per_epoch = 0;
  const std::size_t w = config.window;
  for (const auto& walk : corpus.walks) {
    for (VertexIndex v : walk) {
      if (v >= vertex_count) {
        throw ValidationError("corpus vertex " + std::to_string(v) + " outside a table of " +
                              std::to_string(vertex_count) + " rows");
      }
      ++counts[v];
    }
    const std::size_t n = walk.size();
    for (std::size_t i = 0; i < n; ++i) {
      pairs_per_epoch += std::min(n - 1, i + w) - (i >= w ? i - w : 0);
    }
  }
  if (pairs_per_epoch == 0) throw ValidationError("corpus has no (center, context) pairs");

  std::vector<double> noise_weight;
  std::vector<VertexIndex> noise_vertex;
  std::uint64_t total_tokens = 0;
  for (VertexIndex v = 0; v < vertex_count; ++v) {
    total_tokens += counts[v];
    if (counts[v] == 0) continue;
    noise_vertex.push_back(v);
    noise_weight.push_back(std::pow(static_cast<double>(counts[v]), 0.75));
  }
  const AliasTable noise(noise_weight);

  std::vector<double> keep;
  if (config.subsample) {
    keep.assign(vertex_count, 1.0);
    const double t = config.subsample_threshold * static_cast<double>(total_tokens);
    for (VertexIndex v = 0; v < vertex_count; ++v) {
      if (counts[v] == 0) continue;
      const double f = static_cast<double>(counts[v]);
      keep[v] = std::min(1.0, (std::sqrt(f / t) + 1.0) * t / f);
    }
  }

  TrainedEmbedding result;
  EmbeddingTable& table = result.table;
  table = EmbeddingTable(vertex_count, config.dimension, corpus.graph_fingerprint);
  TrainState state(vertex_count, config.dimension);
  {
    auto init = make_engine({config.seed, 0x696e6974ULL});
    const double scale = 1.0 / static_cast<double>(config.dimension);
    for (VertexIndex v = 0; v < vertex_count; ++v) {
      Real* row = state.input_row(v);
      for (std::size_t k = 0; k < config.dimension; ++k) row[k] = static_cast<Real>((uniform01(init) - 0.5) * scale);
    }
  }

  const TrainContext ctx{config, noise, noise_vertex, keep,
                         static_cast<double>(pairs_per_epoch) * static_cast<double>(config.epochs)};
  Progress progress;
  result.report.pairs_per_epoch = pairs_per_epoch;
  const std::size_t workers = std::clamp<std::size_t>(config.workers, 1, corpus.walks.size());
  const std::span<const Walk> walks(corpus.walks);
  const auto end_epoch = [&](std::size_t epoch, double loss, std::size_t pairs) {
    result.report.epoch_loss.push_back(loss / static_cast<double>(std::max<std::size_t>(pairs, 1)));
    if (config.on_epoch_end) {
      state.export_to(table);
      config.on_epoch_end(epoch, table);
    }
  };

  if (workers == 1) {
    Worker<false> worker(state, ctx, progress, FastEngine(derive_seed({config.seed, 0})));
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
      const auto [loss, pairs] = worker.run(walks);
      end_epoch(epoch, loss, pairs);
    }
  } else {
    std::vector<Worker<true>> pool;
    pool.reserve(workers);
    for (std::size_t k = 0; k < workers; ++k) pool.emplace_back(state, ctx, progress, FastEngine(derive_seed({config.seed, k})));
    const std::size_t chunk = (walks.size() + workers - 1) / workers;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
      std::vector<std::pair<double, std::size_t>> partial(workers);
      {
        std::vector<std::jthread> threads;
        for (std::size_t k = 0; k < workers; ++k) {
          const std::size_t begin = std::min(walks.size(), k * chunk);
          const std::size_t end = std::min(walks.size(), begin + chunk);
          threads.emplace_back([&, k, begin, end] { partial[k] = pool[k].run(walks.subspan(begin, end - begin)); });
        }
      }
      double loss = 0.0;
      std::size_t pairs = 0;
      for (const auto& [l, p] : partial) {
        loss += l;
        pairs += p;
      }
      end_epoch(epoch, loss, pairs);
    }
  }
  state.export_to(table);
  return result;
}

// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'H', 'Y', 'P', 'E', 'R', 'E', 'M', 'B'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderBytes = sizeof kMagic + sizeof(std::uint32_t) + 3 * sizeof(std::uint64_t);

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <typename T>
T get(std::istream& in, const std::string& source) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof value)) {
    throw FormatError(source + ": truncated embedding header");
  }
  return value;
}

std::string hex(std::uint64_t x) {
  std::ostringstream s;
  s << std::hex << x;
  return s.str();
}

}  // namespace

void save_embeddings(const std::filesystem::path& path, const EmbeddingTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kVersion);
  put<std::uint64_t>(out, table.rows());
  put<std::uint64_t>(out, table.dimension());
  put<std::uint64_t>(out, table.fingerprint());
  const auto& data = table.input_data();
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(double)));
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

EmbeddingTable load_embeddings(const std::filesystem::path& path, std::optional<std::uint64_t> expected_fingerprint) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string source = path.string();
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw FormatError(source + ": not an embedding file");
  }
  const auto version = get<std::uint32_t>(in, source);
  if (version != kVersion) throw FormatError(source + ": unsupported version " + std::to_string(version));
  const auto rows = get<std::uint64_t>(in, source);
  const auto dim = get<std::uint64_t>(in, source);
  const auto fingerprint = get<std::uint64_t>(in, source);
  if (dim == 0) throw FormatError(source + ": zero dimension");

  const auto size = std::filesystem::file_size(path);
  const auto payload = size - kHeaderBytes;
  if (payload != rows * dim * sizeof(double)) {
    throw FormatError(source + ": header declares " + std::to_string(rows) + " x " + std::to_string(dim) +
                      " values but payload holds " + std::to_string(payload / sizeof(double)));
  }
  if (expected_fingerprint && *expected_fingerprint != fingerprint) {
    throw FingerprintError(source + ": embeddings were trained on graph " + hex(fingerprint) +
                           ", current graph is " + hex(*expected_fingerprint) +
                           "; rerun walk and train for this dataset and split");
  }
  EmbeddingTable table(rows, dim, fingerprint);
  auto& data = table.input_data();
  if (!in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(double)))) {
    throw FormatError(source + ": truncated embedding payload");
  }
  return table;
}

void export_embeddings_text(std::ostream& out, const EmbeddingTable& table, std::span<const std::string> keys) {
  if (keys.size() != table.rows()) throw ValidationError("one key per embedding row required");
  out << table.rows() << ' ' << table.dimension() << ' ' << hex(table.fingerprint()) << '\n';
  out.precision(17);
  for (std::size_t v = 0; v < table.rows(); ++v) {
    out << keys[v];
    for (double x : table.row(v)) out << ' ' << x;
    out << '\n';
  }
}

TextEmbeddings import_embeddings_text(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError(source + ": empty embedding file");
  std::istringstream header(line);
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::string fp;
  if (!(header >> rows >> dim >> fp) || dim == 0) throw FormatError(source + ": bad embedding header");
  TextEmbeddings out;
  out.table = EmbeddingTable(rows, dim, std::stoull(fp, nullptr, 16));
  for (std::size_t v = 0; v < rows; ++v) {
    if (!std::getline(in, line)) {
      throw FormatError(source + ": expected " + std::to_string(rows) + " rows, found " + std::to_string(v));
    }
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    std::vector<double> values;
    double x = 0.0;
    while (ls >> x) values.push_back(x);
    if (!ls.eof()) throw FormatError(source + ":" + std::to_string(v + 2) + ": non-numeric value");
    if (values.size() != dim) {
      throw FormatError(source + ":" + std::to_string(v + 2) + ": row has " + std::to_string(values.size()) +
                        " values, header says " + std::to_string(dim));
    }
    std::copy(values.begin(), values.end(), out.table.row(v).begin());
    out.keys.push_back(std::move(key));
  }
  return out;
}

}  // namespace hyperrec
