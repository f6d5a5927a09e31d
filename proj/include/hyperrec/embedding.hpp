#pragma once

// Skip-gram with negative sampling over walk corpora, plus embedding
// persistence.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hyperrec/walker.hpp"

namespace hyperrec {

/// Dense |V| x s tables. `input` rows are the vertex representations used
/// downstream; `context` rows only exist during and right after training.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::size_t rows, std::size_t dimension, std::uint64_t fingerprint);

  std::size_t rows() const { return rows_; }
  std::size_t dimension() const { return dimension_; }
  std::uint64_t fingerprint() const { return fingerprint_; }

  std::span<double> row(std::size_t v) { return {input_.data() + v * dimension_, dimension_}; }
  std::span<const double> row(std::size_t v) const { return {input_.data() + v * dimension_, dimension_}; }

  bool has_context() const { return !context_.empty(); }
  std::span<double> context_row(std::size_t v) { return {context_.data() + v * dimension_, dimension_}; }
  std::span<const double> context_row(std::size_t v) const {
    return {context_.data() + v * dimension_, dimension_};
  }

  std::vector<double>& input_data() { return input_; }
  const std::vector<double>& input_data() const { return input_; }
  std::vector<double>& context_data() { return context_; }
  void drop_context() { context_ = {}; }

  bool all_finite() const;

  /// Compares shape, fingerprint and input vectors bit for bit.
  friend bool operator==(const EmbeddingTable& a, const EmbeddingTable& b) {
    return a.rows_ == b.rows_ && a.dimension_ == b.dimension_ && a.fingerprint_ == b.fingerprint_ &&
           a.input_ == b.input_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t dimension_ = 0;
  std::uint64_t fingerprint_ = 0;
  std::vector<double> input_;
  std::vector<double> context_;
};

struct EmbeddingConfig {
  std::size_t dimension = 50;
  std::size_t window = 5;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  double learning_rate = 0.025;
  std::uint64_t seed = 42;
  /// Frequent-token subsampling; off unless asked for.
  bool subsample = false;
  double subsample_threshold = 1e-3;
  /// 1 gives bit-reproducible training. More workers share the tables
  /// without locks and give up determinism.
  std::size_t workers = 1;
  /// Called after every epoch with the current tables (input and context).
  std::function<void(std::size_t epoch, const EmbeddingTable&)> on_epoch_end;

  void validate() const;
};

struct TrainingReport {
  std::vector<double> epoch_loss;  // mean pair loss per epoch
  std::size_t pairs_per_epoch = 0;
};

struct TrainedEmbedding {
  EmbeddingTable table;
  TrainingReport report;
};

/// Trains over every (center, context) pair within `window` positions.
/// Noise tokens follow the corpus unigram distribution raised to 3/4; the
/// learning rate decays linearly to 1e-4 of its start over all pairs.
TrainedEmbedding train_skipgram(const WalkCorpus& corpus, std::size_t vertex_count, const EmbeddingConfig& config);

struct PairLoss {
  double loss = 0.0;
  std::vector<double> grad_center;
  std::vector<double> grad_context;
  std::vector<std::vector<double>> grad_negatives;
};

/// loss = -log sigma(u.v) - sum_k log sigma(-u.n_k) with analytic gradients.
PairLoss sgns_pair_loss(std::span<const double> center, std::span<const double> context,
                        std::span<const std::span<const double>> negatives);

double log_sigmoid(double x);
double sigmoid(double x);

// ---- persistence ----

/// Binary layout: magic "HYPEREMB", u32 version, u64 rows, u64 dimension,
/// u64 fingerprint, then rows * dimension little-endian doubles.
void save_embeddings(const std::filesystem::path& path, const EmbeddingTable& table);
/// Throws FormatError on a corrupt or truncated file and FingerprintError
/// when `expected_fingerprint` is given and differs.
EmbeddingTable load_embeddings(const std::filesystem::path& path,
                               std::optional<std::uint64_t> expected_fingerprint = std::nullopt);

/// Text export: "rows dimension fingerprint" header, then "key v1 ... vs".
void export_embeddings_text(std::ostream& out, const EmbeddingTable& table, std::span<const std::string> keys);

struct TextEmbeddings {
  EmbeddingTable table;
  std::vector<std::string> keys;
};
TextEmbeddings import_embeddings_text(std::istream& in, const std::string& source = "<stream>");

}  // namespace hyperrec
