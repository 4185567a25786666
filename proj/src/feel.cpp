#include "tbma/feel.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <thread>

#include "tbma/errors.hpp"
#include "tbma/rng.hpp"

namespace tbma {

std::string to_string(Aggregation a) {
  switch (a) {
    case Aggregation::Ideal: return "ideal";
    case Aggregation::Tbma: return "tbma";
    case Aggregation::Dsb: return "dsb";
  }
  return "?";
}

Aggregation aggregation_from_string(const std::string& name) {
  if (name == "ideal") return Aggregation::Ideal;
  if (name == "tbma") return Aggregation::Tbma;
  if (name == "dsb") return Aggregation::Dsb;
  throw ConfigError("unknown aggregation \"" + name + "\"");
}

void FeelConfig::validate() const {
  if (n_devices < 1) throw ConfigError("n_devices must be >= 1");
  if (rounds < 0) throw ConfigError("rounds must be >= 0");
  if (train.epochs < 0) throw ConfigError("local_epochs must be >= 0");
  if (!(train.learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (train.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (!std::isfinite(channel.snr_db) && !(channel.snr_db > 0.0)) {
    throw ConfigError("snr_db must be finite or +inf");
  }
  quantizer.validate();
  arch.validate();
}

namespace {

void check_cohort(std::span<const ModelVector> models) {
  if (models.empty()) throw ShapeError("aggregate: empty cohort");
  const auto& first = models.front();
  for (const auto& m : models) {
    if (!(m.layout == first.layout) || m.size() != first.size()) {
      throw ShapeError("aggregate: models have different layouts");
    }
  }
}

}  // namespace

ModelVector aggregate_ideal(std::span<const ModelVector> models) {
  check_cohort(models);
  ModelVector out{std::vector<double>(models.front().size(), 0.0),
                  models.front().layout};
  for (const auto& m : models) {
    for (std::size_t q = 0; q < out.size(); ++q) out.values[q] += m.values[q];
  }
  const double inv = 1.0 / static_cast<double>(models.size());
  for (double& v : out.values) v *= inv;
  return out;
}

AggregationResult aggregate_tbma(std::span<const ModelVector> models,
                                 const ModelVector& previous,
                                 const QuantizerSpec& spec,
                                 const ToneFamily& family,
                                 const ChannelConfig& channel, int round,
                                 Normalization norm) {
  check_cohort(models);
  spec.validate();
  if (family.size() != spec.n_levels) {
    throw ShapeError("aggregate_tbma: tone family size != quantizer levels");
  }
  const std::size_t n_params = models.front().size();
  if (previous.size() != n_params) {
    throw ShapeError("aggregate_tbma: previous global model has wrong length");
  }

  const int k = static_cast<int>(models.size());
  const double sigma = channel_sigma(channel, family.sample_power(), k);
  const auto n_tones = static_cast<std::size_t>(family.size());

  AggregationResult result{previous, 0, 0.0};
  std::vector<double> received(n_tones);
  std::vector<double> scores(n_tones);
  std::size_t saturated = 0;

  for (std::size_t block = 0; block * kNoiseBlock < n_params; ++block) {
    auto rng = make_rng(channel.seed, {kNoiseStream,
                                       static_cast<std::uint64_t>(round),
                                       static_cast<std::uint64_t>(block)});
    const std::size_t end = std::min(n_params, (block + 1) * kNoiseBlock);
    for (std::size_t q = block * kNoiseBlock; q < end; ++q) {
      std::fill(received.begin(), received.end(), 0.0);
      for (const auto& m : models) {
        const double w = m.values[q];
        if (saturates(w, spec)) ++saturated;
        family.add_tone(quantize(w, spec), received);
      }
      add_awgn_inplace(received, sigma, rng);
      correlate_bank_into(received, family, scores);
      try {
        result.model.values[q] =
            mean_from_type(estimate_type(scores, k), spec, norm);
      } catch (const DegenerateTypeError&) {
        ++result.fallback_count;
      }
    }
  }
  result.saturation_fraction =
      static_cast<double>(saturated) /
      (static_cast<double>(n_params) * static_cast<double>(k));
  return result;
}

ModelVector aggregate_dsb(std::span<const ModelVector> models,
                          const ChannelConfig& channel, int round,
                          int samples_per_symbol, double full_scale) {
  check_cohort(models);
  if (!(full_scale > 0.0)) {
    throw InputDomainError("aggregate_dsb: full scale must be positive");
  }
  const int cycles = default_carrier_cycles(samples_per_symbol);
  const int k = static_cast<int>(models.size());
  // A full-scale symbol has mean sample power full_scale^2 / 2.
  const double sigma =
      channel_sigma(channel, 0.5 * full_scale * full_scale, k);
  const std::size_t n_params = models.front().size();

  // The carrier is the same for every device and parameter.
  const auto carrier = dsb_modulate(1.0, samples_per_symbol, cycles).samples;
  std::vector<double> received(carrier.size());

  ModelVector out{std::vector<double>(n_params, 0.0), models.front().layout};
  for (std::size_t block = 0; block * kNoiseBlock < n_params; ++block) {
    auto rng = make_rng(channel.seed, {kNoiseStream,
                                       static_cast<std::uint64_t>(round),
                                       static_cast<std::uint64_t>(block)});
    const std::size_t end = std::min(n_params, (block + 1) * kNoiseBlock);
    for (std::size_t q = block * kNoiseBlock; q < end; ++q) {
      std::fill(received.begin(), received.end(), 0.0);
      for (const auto& m : models) {
        const double v = m.values[q];
        for (std::size_t n = 0; n < carrier.size(); ++n) {
          received[n] += v * carrier[n];
        }
      }
      add_awgn_inplace(received, sigma, rng);
      out.values[q] = dsb_demodulate(received, cycles) / k;
    }
  }
  return out;
}

namespace {

std::vector<ModelVector> train_devices(
    const ModelVector& global, const Dataset& train,
    const std::vector<std::vector<std::size_t>>& shards,
    const FeelConfig& config, int round) {
  const auto n = shards.size();
  std::vector<ModelVector> locals(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t k = next++; k < n; k = next++) {
      try {
        auto rng = make_rng(config.seed, {kLocalTrainStream,
                                          static_cast<std::uint64_t>(round),
                                          static_cast<std::uint64_t>(k)});
        locals[k] = local_train(global, train, shards[k], config.train, rng,
                                {static_cast<int>(k), round});
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };

  const auto n_threads =
      std::min<std::size_t>(static_cast<std::size_t>(config.threads), n);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return locals;
}

double mean_abs_diff(const ModelVector& a, const ModelVector& b) {
  double acc = 0.0;
  for (std::size_t q = 0; q < a.size(); ++q) acc += std::abs(a.values[q] - b.values[q]);
  return a.size() ? acc / static_cast<double>(a.size()) : 0.0;
}

}  // namespace

std::vector<RoundMetrics> run_feel(const FeelConfig& config,
                                   const Dataset& train, const Dataset& test,
                                   const RoundCallback& on_round) {
  config.validate();
  if (test.size() == 0) throw ConfigError("run_feel: empty test set");

  const auto shards =
      shard(train, config.n_devices, config.partition, config.seed);
  ModelVector global = init_model(config.arch, config.seed);

  std::optional<ToneFamily> family;
  if (config.aggregation == Aggregation::Tbma) {
    family.emplace(config.quantizer.n_levels);
  }
  const double full_scale =
      std::max(std::abs(config.quantizer.lo), std::abs(config.quantizer.hi));

  std::vector<RoundMetrics> metrics;
  auto emit = [&](const RoundMetrics& m) {
    metrics.push_back(m);
    if (on_round) on_round(m);
  };
  emit({0, evaluate(global, test), 0.0, 0, 0.0, 0.0});

  using Clock = std::chrono::steady_clock;
  for (int round = 1; round <= config.rounds; ++round) {
    const auto t0 = Clock::now();
    const auto locals = train_devices(global, train, shards, config, round);
    const ModelVector ideal = aggregate_ideal(locals);

    RoundMetrics m;
    m.round = round;
    switch (config.aggregation) {
      case Aggregation::Ideal:
        global = ideal;
        break;
      case Aggregation::Tbma: {
        auto r = aggregate_tbma(locals, global, config.quantizer, *family,
                                config.channel, round, config.normalization);
        global = std::move(r.model);
        m.fallback_count = r.fallback_count;
        m.saturation_fraction = r.saturation_fraction;
        break;
      }
      case Aggregation::Dsb:
        global = aggregate_dsb(locals, config.channel, round,
                               config.quantizer.n_levels, full_scale);
        break;
    }
    m.agg_error_vs_ideal = mean_abs_diff(global, ideal);
    m.accuracy = evaluate(global, test);
    if (config.record_wall_time) {
      m.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    }
    emit(m);
  }
  return metrics;
}

}  // namespace tbma
