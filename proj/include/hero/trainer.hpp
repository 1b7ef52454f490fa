#pragma once

// Split / train / evaluate / learning-rate grid search.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hero/dataset.hpp"
#include "hero/embed.hpp"
#include "hero/metrics.hpp"
#include "hero/model.hpp"

namespace hero {

struct TrainConfig {
  double lr = 1e-4;
  int max_epochs = 50;
  std::uint64_t seed = 1;
  int d = 100;
  SharingMode mode = SharingMode::UNIFIED;
  AblationMode ablation = AblationMode::FULL;
  bool shuffle = true;
  bool zero_init_classifier = false;

  void check() const;
};

// key=value lines; '#' starts a comment. Unknown keys are an error.
TrainConfig parse_config(std::istream& in);
TrainConfig load_config(const std::string& path);
std::string format_config(const TrainConfig& config);

struct Split {
  std::vector<LabeledDocument> train, val, test;
};

class TrainError : public std::runtime_error {
 public:
  enum class Kind { TooFewDocuments, DimMismatch, NonFiniteLoss };
  TrainError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline constexpr std::size_t kMinSplitDocuments = 10;

// Seeded shuffle, then floor(0.7q) / floor(0.1q) / remainder.
Split split_dataset(std::vector<LabeledDocument> docs, std::uint64_t seed);

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  MetricsReport val;
};

struct TrainReport {
  TrainConfig config;
  std::size_t train_size = 0, val_size = 0, test_size = 0;
  std::size_t oov_tokens = 0;  // over one pass of the training split
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  std::optional<MetricsReport> test;
};

struct TrainResult {
  ModelParams model;
  TrainReport report;
};

// Batch size 1 Adam; returns the parameters from the epoch with the best
// validation AUC (earliest on ties).
TrainResult train(const Split& split, const TrainConfig& config, const EmbeddingTable& table);

MetricsReport evaluate(const ModelParams& model, std::span<const LabeledDocument> docs,
                       const EmbeddingTable& table);
MetricsReport evaluate_serial(const ModelParams& model, std::span<const LabeledDocument> docs,
                              const EmbeddingTable& table);

struct GridCell {
  double lr = 0.0;
  bool failed = false;
  std::string error;
  std::optional<TrainReport> report;
};

struct GridResult {
  double best_lr = 0.0;
  std::vector<GridCell> cells;
  TrainResult best;
};

inline const std::vector<double> kDefaultLrGrid = {0.1, 0.01, 0.001, 0.0001};

// One model per rate; best = highest validation AUC at its best epoch, ties
// toward the smaller rate. Cells that hit NonFiniteLoss are marked failed.
GridResult grid_search_lr(const Split& split, const TrainConfig& base, std::span<const double> grid,
                          const EmbeddingTable& table);

std::string report_to_json(const TrainReport& report);
std::string grid_to_json(const GridResult& grid);
std::string metrics_to_json(const MetricsReport& m);
// Fixed-column text table.
std::string metrics_table(const MetricsReport& m, const std::string& title = "");

}  // namespace hero
