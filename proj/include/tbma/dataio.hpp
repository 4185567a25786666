#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace tbma {

// Row-major feature matrix (n_samples x n_dims) with values in [0, 1] and
// integer labels in [0, n_classes).
struct Dataset {
  std::vector<double> features;
  std::vector<int> labels;
  int n_dims = 0;
  int n_classes = 0;

  std::size_t size() const { return labels.size(); }
  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * static_cast<std::size_t>(n_dims),
            static_cast<std::size_t>(n_dims)};
  }

  // Throws ConsistencyError if the invariants above do not hold.
  void validate() const;
};

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

/// Reads an IDX image file (magic 0x803: count, rows, cols, then bytes) and an
/// IDX label file (magic 0x801: count, then bytes). Pixels are scaled by
/// 1/255. Throws FormatError (magic / label range), ConsistencyError (count
/// mismatch), LengthError (truncated file) or std::runtime_error (I/O).
Dataset load_idx(const std::filesystem::path& images,
                 const std::filesystem::path& labels, int n_classes = 10);

/// Writes `data` as an IDX pair with the given image geometry. Features are
/// stored as round(255 * x).
void write_idx(const Dataset& data, int rows, int cols,
               const std::filesystem::path& images,
               const std::filesystem::path& labels);

/// Gaussian blobs. Class c is centred at separation * u_c, where u_c is a
/// seeded random unit vector; samples add unit isotropic noise. Labels cycle
/// 0, 1, ..., n_classes - 1 so any prefix is class-balanced. All features
/// are then rescaled by one affine map onto [0, 1].
Dataset synthetic(std::uint64_t seed, int n_samples, int n_dims, int n_classes,
                  double separation);

/// Rows [begin, end) as a new dataset.
Dataset slice(const Dataset& data, std::size_t begin, std::size_t end);

enum class ShardScheme { Iid, LabelSorted };

/// Splits sample indices into K disjoint shards of floor(n / K) samples each;
/// the remainder is dropped. Iid shuffles with `seed` first, LabelSorted
/// stable-sorts by label. Throws ConfigError when K < 1 or K > n.
std::vector<std::vector<std::size_t>> shard(const Dataset& data, int n_shards,
                                            ShardScheme scheme,
                                            std::uint64_t seed);

}  // namespace tbma
