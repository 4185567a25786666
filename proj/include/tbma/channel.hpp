#pragma once

#include <cstdint>
#include <span>

#include "tbma/modem.hpp"
#include "tbma/rng.hpp"

namespace tbma {

// Which signal power the SNR axis refers to.
//   PerDevice: one device's received sample power over the noise variance.
//   Aggregate: the superposition of K devices, taken as K times that power.
enum class SnrReference { PerDevice, Aggregate };

struct ChannelConfig {
  double snr_db = 10.0;
  std::uint64_t seed = 0;
  SnrReference reference = SnrReference::PerDevice;
};

/// Sample-wise sum of K >= 1 equal-length waveforms. The result is a mixture
/// and carries no amplitude. Throws ShapeError on mismatch or empty input.
Waveform superimpose(std::span<const Waveform> waveforms);

/// In-place accumulation used on the hot path of the aggregators.
void accumulate(std::span<double> acc, std::span<const double> waveform);

/// sqrt(power / 10^(snr_db / 10)). Throws InputDomainError when power <= 0
/// or snr_db is NaN. snr_db = +inf gives 0.
double noise_sigma(double snr_db, double per_sample_signal_power);

/// Noise standard deviation for `n_devices` transmitters each emitting
/// `per_device_power` per sample, under the configured SNR reference.
double channel_sigma(const ChannelConfig& config, double per_device_power,
                     int n_devices);

/// Adds i.i.d. N(0, sigma^2) to every sample. sigma = 0 returns the input
/// untouched and draws nothing from `rng`.
Waveform add_awgn(Waveform waveform, double sigma, Rng& rng);
void add_awgn_inplace(std::span<double> samples, double sigma, Rng& rng);

}  // namespace tbma
