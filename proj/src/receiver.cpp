#include "tbma/receiver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tbma/dct.hpp"
#include "tbma/errors.hpp"

namespace tbma {

double TypeHistogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), 0.0);
}

namespace {

void check_lengths(std::span<const double> received, const ToneFamily& family,
                   std::span<double> scores) {
  const auto n = static_cast<std::size_t>(family.size());
  if (received.size() != n || scores.size() != n) {
    throw ShapeError("correlate_bank: received length " +
                     std::to_string(received.size()) + " != N = " +
                     std::to_string(n));
  }
}

}  // namespace

void correlate_bank_direct_into(std::span<const double> received,
                                const ToneFamily& family,
                                std::span<double> scores) {
  check_lengths(received, family, scores);
  const int n_tones = family.size();
  const double gain = 1.0 / (family.amplitude() * family.amplitude());
  for (int m = 0; m < n_tones; ++m) {
    double acc = ToneFamily::weight(0) * received[0] * family.at(m, 0);
    for (int n = 1; n < n_tones; ++n) acc += received[n] * family.at(m, n);
    scores[m] = acc * gain;
  }
}

void correlate_bank_into(std::span<const double> received,
                         const ToneFamily& family, std::span<double> scores) {
  if (family.size() < kFastCorrelatorMinN) {
    correlate_bank_direct_into(received, family, scores);
    return;
  }
  check_lengths(received, family, scores);
  // The half-weighted bank is a DCT-III of the received block; the tone
  // scale A_c sqrt(2/N) and the 1/A_c^2 gain fold into one factor.
  dct3_half(received, scores);
  const double gain = std::sqrt(2.0 / family.size()) / family.amplitude();
  for (double& s : scores) s *= gain;
}

std::vector<double> correlate_bank_direct(std::span<const double> received,
                                          const ToneFamily& family) {
  std::vector<double> scores(static_cast<std::size_t>(family.size()));
  correlate_bank_direct_into(received, family, scores);
  return scores;
}

std::vector<double> correlate_bank(std::span<const double> received,
                                   const ToneFamily& family) {
  std::vector<double> scores(static_cast<std::size_t>(family.size()));
  correlate_bank_into(received, family, scores);
  return scores;
}

TypeHistogram estimate_type(std::span<const double> raw_scores, int n_devices) {
  if (raw_scores.size() < 2) {
    throw ShapeError("estimate_type: need at least 2 scores");
  }
  if (n_devices < 1) {
    throw ConfigError("estimate_type: K must be >= 1");
  }
  TypeHistogram hist;
  hist.n_devices = n_devices;
  hist.counts.resize(raw_scores.size());
  std::transform(raw_scores.begin(), raw_scores.end(), hist.counts.begin(),
                 [](double s) { return s > 0.0 ? s : 0.0; });
  return hist;
}

namespace {

void check_shape(const TypeHistogram& hist, const QuantizerSpec& spec) {
  if (hist.counts.size() != static_cast<std::size_t>(spec.n_levels)) {
    throw ShapeError("type has " + std::to_string(hist.counts.size()) +
                     " levels, quantizer has " +
                     std::to_string(spec.n_levels));
  }
}

}  // namespace

double mean_from_type(const TypeHistogram& hist, const QuantizerSpec& spec,
                      Normalization norm) {
  check_shape(hist, spec);
  const double mass = hist.total();
  if (!(mass > 0.0)) {
    throw DegenerateTypeError("mean_from_type: type has no mass");
  }
  double acc = 0.0;
  for (int m = 0; m < spec.n_levels; ++m) {
    acc += hist.counts[m] * reconstruct(m, spec);
  }
  const double denom =
      norm == Normalization::DeclaredK ? hist.n_devices : mass;
  return acc / denom;
}

double stat_from_type(const TypeHistogram& hist, const QuantizerSpec& spec,
                      Statistic which) {
  check_shape(hist, spec);
  std::vector<double> rounded(hist.counts.size());
  std::transform(hist.counts.begin(), hist.counts.end(), rounded.begin(),
                 [](double c) { return std::round(c); });
  const double k = std::accumulate(rounded.begin(), rounded.end(), 0.0);
  if (!(k > 0.0)) {
    throw DegenerateTypeError("stat_from_type: rounded type is empty");
  }

  const int n_levels = spec.n_levels;
  switch (which) {
    case Statistic::Max:
      for (int m = n_levels - 1; m >= 0; --m) {
        if (rounded[m] >= 1.0) return reconstruct(m, spec);
      }
      break;
    case Statistic::Min:
      for (int m = 0; m < n_levels; ++m) {
        if (rounded[m] >= 1.0) return reconstruct(m, spec);
      }
      break;
    case Statistic::HarmonicMean:
    case Statistic::GeometricMean: {
      double acc = 0.0;
      for (int m = 0; m < n_levels; ++m) {
        if (rounded[m] < 1.0) continue;
        const double v = reconstruct(m, spec);
        if (!(v > 0.0)) {
          throw InputDomainError(
              "stat_from_type: harmonic/geometric mean needs positive levels");
        }
        acc += which == Statistic::HarmonicMean ? rounded[m] / v
                                                : rounded[m] * std::log(v);
      }
      return which == Statistic::HarmonicMean ? k / acc : std::exp(acc / k);
    }
    case Statistic::Variance: {
      double s1 = 0.0;
      double s2 = 0.0;
      for (int m = 0; m < n_levels; ++m) {
        const double v = reconstruct(m, spec);
        s1 += rounded[m] * v;
        s2 += rounded[m] * v * v;
      }
      const double mean = s1 / k;
      return std::max(0.0, s2 / k - mean * mean);
    }
  }
  throw DegenerateTypeError("stat_from_type: no level present");
}

std::vector<double> level_histogram(std::span<const int> levels, int n_levels) {
  std::vector<double> hist(static_cast<std::size_t>(n_levels), 0.0);
  for (int m : levels) {
    if (m < 0 || m >= n_levels) {
      throw IndexError("level_histogram: level " + std::to_string(m) +
                       " out of range");
    }
    hist[m] += 1.0;
  }
  return hist;
}

double total_variation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    throw ShapeError("total_variation: histograms must have equal length");
  }
  const double sa = std::accumulate(a.begin(), a.end(), 0.0);
  const double sb = std::accumulate(b.begin(), b.end(), 0.0);
  if (!(sa > 0.0) || !(sb > 0.0)) {
    throw DegenerateTypeError("total_variation: histogram has no mass");
  }
  double l1 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) l1 += std::abs(a[i] / sa - b[i] / sb);
  return 0.5 * l1;
}

}  // namespace tbma
