#pragma once

#include <span>
#include <vector>

namespace tbma {

// N-level uniform quantizer over [lo, hi). Values outside the range saturate
// to the nearest edge cell. Level index m is the cell index itself.
struct QuantizerSpec {
  int n_levels = 32;
  double lo = -1.0;
  double hi = 1.0;

  double cell_width() const { return (hi - lo) / n_levels; }

  // Throws ConfigError when n_levels < 2 or the range is empty/non-finite.
  void validate() const;
};

/// Cell index of `value`, saturating out-of-range input. Throws
/// InputDomainError for NaN/inf.
int quantize(double value, const QuantizerSpec& spec);

/// Cell midpoint lo + (level + 0.5) * width. Throws IndexError when level is
/// outside [0, N).
double reconstruct(int level, const QuantizerSpec& spec);

std::vector<int> quantize_vector(std::span<const double> params,
                                 const QuantizerSpec& spec);

// True when `value` lies outside [lo, hi) and was clipped by quantize().
inline bool saturates(double value, const QuantizerSpec& spec) {
  return value < spec.lo || value >= spec.hi;
}

}  // namespace tbma
