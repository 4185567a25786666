#include "tbma/channel.hpp"

#include <cmath>
#include <random>
#include <string>

#include "tbma/errors.hpp"

namespace tbma {

Waveform superimpose(std::span<const Waveform> waveforms) {
  if (waveforms.empty()) {
    throw ShapeError("superimpose: need at least one waveform");
  }
  Waveform out;
  out.samples.assign(waveforms.front().size(), 0.0);
  for (const auto& w : waveforms) accumulate(out.samples, w.samples);
  return out;
}

void accumulate(std::span<double> acc, std::span<const double> waveform) {
  if (acc.size() != waveform.size()) {
    throw ShapeError("superimpose: waveform length " +
                     std::to_string(waveform.size()) + " != " +
                     std::to_string(acc.size()));
  }
  for (std::size_t n = 0; n < acc.size(); ++n) acc[n] += waveform[n];
}

double noise_sigma(double snr_db, double per_sample_signal_power) {
  if (!(per_sample_signal_power > 0.0) ||
      !std::isfinite(per_sample_signal_power)) {
    throw InputDomainError("noise_sigma: signal power must be positive");
  }
  if (std::isnan(snr_db)) {
    throw InputDomainError("noise_sigma: snr_db is NaN");
  }
  return std::sqrt(per_sample_signal_power / std::pow(10.0, snr_db / 10.0));
}

double channel_sigma(const ChannelConfig& config, double per_device_power,
                     int n_devices) {
  const double power = config.reference == SnrReference::PerDevice
                           ? per_device_power
                           : per_device_power * n_devices;
  return noise_sigma(config.snr_db, power);
}

void add_awgn_inplace(std::span<double> samples, double sigma, Rng& rng) {
  if (!(sigma >= 0.0)) {
    throw InputDomainError("add_awgn: sigma must be >= 0");
  }
  if (sigma == 0.0) return;
  std::normal_distribution<double> gauss(0.0, sigma);
  for (double& s : samples) s += gauss(rng);
}

Waveform add_awgn(Waveform waveform, double sigma, Rng& rng) {
  add_awgn_inplace(waveform.samples, sigma, rng);
  return waveform;
}

}  // namespace tbma
