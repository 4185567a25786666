#pragma once

#include <span>
#include <vector>

#include "tbma/modem.hpp"
#include "tbma/quantizer.hpp"

namespace tbma {

// Estimated number of devices per quantization level for one parameter.
// Counts are real-valued (noise makes them fractional) and non-negative.
struct TypeHistogram {
  std::vector<double> counts;
  int n_devices = 0;

  double total() const;
};

enum class Normalization { DeclaredK, HistogramSum };

enum class Statistic { HarmonicMean, GeometricMean, Max, Min, Variance };

/// Matched-filter bank over the tone family with the n = 0 sample
/// half-weighted, scaled by 1/A_c^2 so one noiseless device at level m gives
/// the unit vector e_m. Throws ShapeError when the length is not N.
std::vector<double> correlate_bank(std::span<const double> received,
                                   const ToneFamily& family);

/// Same as above, writing into `scores` (size N) without allocating.
void correlate_bank_into(std::span<const double> received,
                         const ToneFamily& family, std::span<double> scores);

// correlate_bank() evaluates the bank as a fast DCT-III from this size on and
// as N explicit inner products below it.
inline constexpr int kFastCorrelatorMinN = 64;

/// Reference route: N explicit weighted inner products, O(N^2).
std::vector<double> correlate_bank_direct(std::span<const double> received,
                                          const ToneFamily& family);
void correlate_bank_direct_into(std::span<const double> received,
                                const ToneFamily& family,
                                std::span<double> scores);

/// Clips negative scores to zero. Throws ShapeError when fewer than 2 scores
/// and ConfigError when K < 1.
TypeHistogram estimate_type(std::span<const double> raw_scores, int n_devices);

/// sum_m counts[m] * reconstruct(m), divided by K (DeclaredK) or by the
/// histogram mass (HistogramSum). Throws DegenerateTypeError for an empty type.
double mean_from_type(const TypeHistogram& hist, const QuantizerSpec& spec,
                      Normalization norm = Normalization::DeclaredK);

/// Statistic of the multiset obtained by rounding each count to the nearest
/// integer (so counts below 0.5 are treated as absent). Harmonic and
/// geometric means require every present level to reconstruct to a positive
/// value (InputDomainError otherwise); an empty rounded multiset raises
/// DegenerateTypeError.
double stat_from_type(const TypeHistogram& hist, const QuantizerSpec& spec,
                      Statistic which);

// Histogram of true levels, as doubles so it compares directly with a type.
std::vector<double> level_histogram(std::span<const int> levels, int n_levels);

// Half the L1 distance between the two histograms after each is normalized
// to unit mass. Both must be non-empty, equal length, positive mass.
double total_variation(std::span<const double> a, std::span<const double> b);

}  // namespace tbma
