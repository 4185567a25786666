#include "tbma/quantizer.hpp"

#include <cmath>
#include <string>

#include "tbma/errors.hpp"

namespace tbma {

void QuantizerSpec::validate() const {
  if (n_levels < 2) {
    throw ConfigError("quantizer needs at least 2 levels, got " +
                      std::to_string(n_levels));
  }
  const double width = cell_width();
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo) ||
      !std::isfinite(width) || !(width > 0.0)) {
    throw ConfigError("quantizer range must satisfy lo < hi with finite, "
                      "positive cell width");
  }
}

int quantize(double value, const QuantizerSpec& spec) {
  if (!std::isfinite(value)) {
    throw InputDomainError("quantize: non-finite value");
  }
  if (value < spec.lo) return 0;
  if (value >= spec.hi) return spec.n_levels - 1;
  const auto level =
      static_cast<int>(std::floor((value - spec.lo) / spec.cell_width()));
  // (value - lo) / width can round up to N for value just below hi.
  return level >= spec.n_levels ? spec.n_levels - 1 : level;
}

double reconstruct(int level, const QuantizerSpec& spec) {
  if (level < 0 || level >= spec.n_levels) {
    throw IndexError("reconstruct: level " + std::to_string(level) +
                     " outside [0, " + std::to_string(spec.n_levels) + ")");
  }
  return spec.lo + (level + 0.5) * spec.cell_width();
}

std::vector<int> quantize_vector(std::span<const double> params,
                                 const QuantizerSpec& spec) {
  std::vector<int> levels;
  levels.reserve(params.size());
  for (std::size_t q = 0; q < params.size(); ++q) {
    if (!std::isfinite(params[q])) {
      throw InputDomainError("quantize_vector: non-finite value at index " +
                             std::to_string(q));
    }
    levels.push_back(quantize(params[q], spec));
  }
  return levels;
}

}  // namespace tbma
