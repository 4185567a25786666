#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tbma/dataio.hpp"
#include "tbma/feel.hpp"

namespace tbma {

struct DatasetSource {
  enum class Kind { Synthetic, Mnist } kind = Kind::Synthetic;

  // Both kinds: how many samples to keep for training / testing.
  int n_train = 2000;
  int n_test = 500;

  // Synthetic blobs.
  std::uint64_t seed = 7;
  int n_dims = 784;
  int n_classes = 10;
  double separation = 16.0;

  // MNIST IDX files.
  std::string train_images;
  std::string train_labels;
  std::string test_images;
  std::string test_labels;
};

struct SweepAxes {
  std::vector<double> snr_db;
  std::vector<int> n_levels;
  std::vector<Aggregation> aggregation;
  std::vector<std::uint64_t> seeds;
};

struct PaprSettings {
  int n_symbols = 100000;
  std::uint64_t seed = 1;
  int n_levels = 32;
};

// A FeelConfig template plus the sweep grid. The per-point fields of `base`
// (aggregation, quantizer.n_levels, channel.snr_db, seeds) are overwritten
// from the sweep axes.
struct ExperimentConfig {
  FeelConfig base;
  SweepAxes sweep;
  DatasetSource dataset;
  PaprSettings papr;
  std::string output_dir = "out";
};

/// Strict JSON parse: unknown keys and empty sweep axes raise SchemaError
/// naming the field; malformed JSON raises SchemaError with line and column.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::filesystem::path& path);

/// Every field, defaults included, in the input schema.
std::string resolved_config_json(const ExperimentConfig& config);

// Loads (or generates) the train and test sets described by `source`.
std::pair<Dataset, Dataset> load_datasets(const DatasetSource& source);

inline constexpr const char* kMetricsHeader =
    "aggregation,n_levels,snr_db,seed,round,accuracy,agg_error_vs_ideal,"
    "fallback_count,saturation_fraction,wall_ms";

struct GridPoint {
  Aggregation aggregation;
  int n_levels;
  double snr_db;
  std::uint64_t seed;
};

/// aggregation-major, then n_levels, snr_db, seed.
std::vector<GridPoint> expand_grid(const SweepAxes& sweep);

/// The FeelConfig of one grid point.
FeelConfig trial_config(const ExperimentConfig& config, const GridPoint& point);

std::string format_metrics_row(const GridPoint& point, const RoundMetrics& m);

struct RunOptions {
  int threads = 1;  // grid points in flight
  bool quiet = false;
};

/// Runs every grid point, writing metrics.csv, accuracy_vs_snr.svg and
/// resolved_config.json into config.output_dir. Rows appear in grid order
/// whatever the thread count. Returns 0 when every trial succeeded; failed
/// trials are reported on stderr and keep the rows they produced.
int run_experiment(const ExperimentConfig& config, const RunOptions& options);

struct PaprRow {
  std::string scheme;
  double papr_db;
  int n_symbols;
  std::uint64_t seed;
};

/// Streams n_symbols standard-normal parameters through both modulators and
/// measures the envelope PAPR of each stream.
std::vector<PaprRow> papr_report(const ExperimentConfig& config);

/// papr_report() plus papr.csv in config.output_dir.
int run_papr(const ExperimentConfig& config, std::ostream& out);

// 6 significant digits, the fixed numeric format of every CSV written here.
std::string format_number(double v);

}  // namespace tbma
