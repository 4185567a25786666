#pragma once

#include <optional>
#include <span>
#include <vector>

namespace tbma {

// One symbol's worth of real baseband samples. `amplitude` is the carrier
// amplitude A_c of a single-device waveform; it is empty for a mixture
// (the output of superimpose()).
struct Waveform {
  std::vector<double> samples;
  std::optional<double> amplitude;

  std::size_t size() const { return samples.size(); }
};

// The N cosine tones used for TBMA: row m is
//   A_c * sqrt(2/N) * cos(pi * (2m + 1) * n / (2N)),  n = 0..N-1.
//
// Under the plain inner product the family has Gram matrix
// A_c^2 * (I + ones/N). Weighting sample n = 0 by 1/2 removes the cross-talk
// and the Gram matrix becomes A_c^2 * I; the receiver relies on that.
class ToneFamily {
 public:
  // Families up to this size keep an explicit N x N tone table; larger ones
  // evaluate tones on demand.
  static constexpr int kMaxTabulated = 4096;

  explicit ToneFamily(int n_tones, double amplitude = 1.0);

  int size() const { return n_; }
  double amplitude() const { return amplitude_; }
  bool tabulated() const { return !table_.empty(); }

  double at(int level, int n) const;

  // acc += tone(level). Throws IndexError for an invalid level and
  // ShapeError when acc.size() != N.
  void add_tone(int level, std::span<double> acc) const;

  // Correlator weight of sample n (1/2 at n = 0, 1 elsewhere).
  static double weight(int n) { return n == 0 ? 0.5 : 1.0; }

  // Mean per-sample power of one device's waveform, A_c^2 (N + 1) / N^2.
  double sample_power() const;

 private:
  std::size_t idx(int level, int n) const {
    return static_cast<std::size_t>(level) * static_cast<std::size_t>(n_) +
           static_cast<std::size_t>(n);
  }
  void check_level(int level) const;

  int n_;
  double amplitude_;
  double scale_;
  std::vector<double> table_;
};

/// Tone for `level`. Throws IndexError for an invalid level.
Waveform mfsk_modulate(int level, const ToneFamily& family);

/// Amplitude-modulated carrier: samples[n] = value * cos(2 pi c n / n_samples).
Waveform dsb_modulate(double value, int n_samples, int carrier_cycles);

/// Coherent DSB demodulation of one symbol: (2 / n) * sum y[n] cos(...).
/// Recovers `value` exactly for a clean dsb_modulate() output.
double dsb_demodulate(std::span<const double> samples, int carrier_cycles);

// Carrier placement used by the DSB baseline for a given symbol length.
int default_carrier_cycles(int n_samples);

enum class Scheme { Mfsk, Dsb };

// Describes how a concatenated sample stream splits into symbols.
struct StreamFraming {
  Scheme scheme = Scheme::Mfsk;
  int samples_per_symbol = 32;
  double amplitude = 1.0;  // A_c, MFSK only
  int carrier_cycles = 8;  // DSB only
};

/// Instantaneous complex-envelope power for every sample of `stream`.
/// An MFSK symbol is a single tone, so its envelope power is the constant
/// A_c^2 * 2/N. A DSB symbol's envelope is |value|, recovered per symbol by
/// coherent demodulation. Throws FramingError on a partial trailing symbol.
std::vector<double> envelope_power(std::span<const double> stream,
                                   const StreamFraming& framing);

/// 10 log10(max / mean). Throws DegenerateInputError for an empty or
/// all-zero sequence and InputDomainError for negative or non-finite entries.
double papr_db(std::span<const double> envelope_powers);

}  // namespace tbma
