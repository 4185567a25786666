#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tbma/channel.hpp"
#include "tbma/dataio.hpp"
#include "tbma/mlp.hpp"
#include "tbma/modem.hpp"
#include "tbma/quantizer.hpp"
#include "tbma/receiver.hpp"

namespace tbma {

enum class Aggregation { Ideal, Tbma, Dsb };

std::string to_string(Aggregation a);
Aggregation aggregation_from_string(const std::string& name);

struct FeelConfig {
  int n_devices = 10;
  int rounds = 20;
  TrainOptions train;
  Aggregation aggregation = Aggregation::Tbma;
  QuantizerSpec quantizer;
  ChannelConfig channel;
  Normalization normalization = Normalization::DeclaredK;
  ShardScheme partition = ShardScheme::Iid;
  Arch arch;
  std::uint64_t seed = 1;
  // Worker threads for local training. Results do not depend on this.
  int threads = 1;
  // Measure wall time per round. Off by default so metrics are reproducible.
  bool record_wall_time = false;

  // Throws ConfigError.
  void validate() const;
};

struct AggregationResult {
  ModelVector model;
  // Parameters whose recovered type was empty and kept the previous value.
  std::size_t fallback_count = 0;
  // Fraction of transmitted (device, parameter) values clipped by the
  // quantizer.
  double saturation_fraction = 0.0;
};

/// Coordinate-wise arithmetic mean. Throws ShapeError on layout mismatch or
/// an empty cohort.
ModelVector aggregate_ideal(std::span<const ModelVector> models);

/// Over-the-air TBMA: for every parameter index, each device quantizes its
/// value and transmits the matching tone; the server receives the noisy
/// superposition, recovers the type with the correlator bank and forms the
/// mean. A parameter whose type carries no mass keeps `previous` value.
/// Noise for parameter q is drawn from the stream (channel.seed, round,
/// q / kNoiseBlock), so the result does not depend on evaluation order.
AggregationResult aggregate_tbma(std::span<const ModelVector> models,
                                 const ModelVector& previous,
                                 const QuantizerSpec& spec,
                                 const ToneFamily& family,
                                 const ChannelConfig& channel, int round = 0,
                                 Normalization norm = Normalization::DeclaredK);

/// Linear analog baseline: every device sends value * cos(2 pi c n / L) for
/// each parameter; the server demodulates the noisy superposition coherently
/// and divides by K. There is no clipping. The noise level is calibrated to
/// the full-scale symbol (|value| = full_scale), so small parameters see a
/// lower effective SNR than the nominal one.
ModelVector aggregate_dsb(std::span<const ModelVector> models,
                          const ChannelConfig& channel, int round = 0,
                          int samples_per_symbol = 32, double full_scale = 1.0);

inline constexpr std::size_t kNoiseBlock = 4096;

struct RoundMetrics {
  int round = 0;
  double accuracy = 0.0;
  // Mean absolute coordinate difference to the ideal average of this round.
  double agg_error_vs_ideal = 0.0;
  std::size_t fallback_count = 0;
  double saturation_fraction = 0.0;
  double wall_ms = 0.0;
};

using RoundCallback = std::function<void(const RoundMetrics&)>;

/// Runs round 0 (evaluation of the initial model) followed by `rounds`
/// rounds of broadcast, local training, aggregation and evaluation.
/// `on_round` sees every record as soon as it is produced, so a caller keeps
/// partial results when a DivergenceError aborts the run.
std::vector<RoundMetrics> run_feel(const FeelConfig& config,
                                   const Dataset& train, const Dataset& test,
                                   const RoundCallback& on_round = {});

}  // namespace tbma
