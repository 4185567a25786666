#include "tbma/modem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "tbma/errors.hpp"

namespace tbma {

namespace {

double tone_phase(int level, int n, int n_tones) {
  return std::numbers::pi * (2.0 * level + 1.0) * n / (2.0 * n_tones);
}

}  // namespace

ToneFamily::ToneFamily(int n_tones, double amplitude)
    : n_(n_tones), amplitude_(amplitude) {
  if (n_tones < 2) {
    throw ConfigError("tone family needs at least 2 tones");
  }
  if (!std::isfinite(amplitude) || amplitude <= 0.0) {
    throw ConfigError("tone amplitude must be positive and finite");
  }
  scale_ = amplitude_ * std::sqrt(2.0 / n_);
  if (n_ > kMaxTabulated) return;
  table_.resize(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_));
  for (int m = 0; m < n_; ++m) {
    for (int n = 0; n < n_; ++n) {
      table_[idx(m, n)] = scale_ * std::cos(tone_phase(m, n, n_));
    }
  }
}

void ToneFamily::check_level(int level) const {
  if (level < 0 || level >= n_) {
    throw IndexError("tone: level " + std::to_string(level) +
                     " outside [0, " + std::to_string(n_) + ")");
  }
}

double ToneFamily::at(int level, int n) const {
  if (tabulated()) return table_[idx(level, n)];
  return scale_ * std::cos(tone_phase(level, n, n_));
}

void ToneFamily::add_tone(int level, std::span<double> acc) const {
  check_level(level);
  if (acc.size() != static_cast<std::size_t>(n_)) {
    throw ShapeError("add_tone: buffer length " + std::to_string(acc.size()) +
                     " != N = " + std::to_string(n_));
  }
  if (tabulated()) {
    const double* row = table_.data() + idx(level, 0);
    for (int n = 0; n < n_; ++n) acc[n] += row[n];
  } else {
    for (int n = 0; n < n_; ++n) acc[n] += scale_ * std::cos(tone_phase(level, n, n_));
  }
}

double ToneFamily::sample_power() const {
  const double n = n_;
  return amplitude_ * amplitude_ * (n + 1.0) / (n * n);
}

Waveform mfsk_modulate(int level, const ToneFamily& family) {
  Waveform w{std::vector<double>(static_cast<std::size_t>(family.size()), 0.0),
             family.amplitude()};
  family.add_tone(level, w.samples);
  return w;
}

int default_carrier_cycles(int n_samples) {
  return std::max(1, n_samples / 4);
}

Waveform dsb_modulate(double value, int n_samples, int carrier_cycles) {
  if (!std::isfinite(value)) {
    throw InputDomainError("dsb_modulate: non-finite value");
  }
  if (n_samples < 2 || carrier_cycles < 1 || 2 * carrier_cycles >= n_samples) {
    throw ConfigError("dsb_modulate: need n_samples >= 2 and "
                      "1 <= carrier_cycles < n_samples / 2");
  }
  Waveform w;
  w.samples.resize(static_cast<std::size_t>(n_samples));
  for (int n = 0; n < n_samples; ++n) {
    w.samples[n] = value * std::cos(2.0 * std::numbers::pi * carrier_cycles *
                                    n / n_samples);
  }
  w.amplitude = std::abs(value);
  return w;
}

double dsb_demodulate(std::span<const double> samples, int carrier_cycles) {
  const auto len = static_cast<int>(samples.size());
  double acc = 0.0;
  for (int n = 0; n < len; ++n) {
    acc += samples[n] *
           std::cos(2.0 * std::numbers::pi * carrier_cycles * n / len);
  }
  return 2.0 * acc / len;
}

std::vector<double> envelope_power(std::span<const double> stream,
                                   const StreamFraming& framing) {
  const auto sps = static_cast<std::size_t>(framing.samples_per_symbol);
  if (sps == 0 || stream.size() % sps != 0) {
    throw FramingError("envelope_power: stream of " +
                       std::to_string(stream.size()) +
                       " samples is not a whole number of " +
                       std::to_string(sps) + "-sample symbols");
  }
  std::vector<double> power(stream.size());
  for (std::size_t start = 0; start < stream.size(); start += sps) {
    double p = 0.0;
    if (framing.scheme == Scheme::Mfsk) {
      p = framing.amplitude * framing.amplitude * 2.0 /
          static_cast<double>(sps);
    } else {
      const double v =
          dsb_demodulate(stream.subspan(start, sps), framing.carrier_cycles);
      p = v * v;
    }
    std::fill_n(power.begin() + static_cast<std::ptrdiff_t>(start), sps, p);
  }
  return power;
}

double papr_db(std::span<const double> envelope_powers) {
  if (envelope_powers.empty()) {
    throw DegenerateInputError("papr: empty sequence");
  }
  double peak = 0.0;
  for (double p : envelope_powers) {
    if (!std::isfinite(p) || p < 0.0) {
      throw InputDomainError("papr: envelope powers must be finite and >= 0");
    }
    peak = std::max(peak, p);
  }
  if (peak == 0.0) {
    throw DegenerateInputError("papr: all-zero sequence");
  }
  // Averaging p / peak keeps a constant sequence at exactly 0 dB.
  double acc = 0.0;
  for (double p : envelope_powers) acc += p / peak;
  const double mean_over_peak = acc / static_cast<double>(envelope_powers.size());
  return 10.0 * std::log10(1.0 / mean_over_peak);
}

}  // namespace tbma
