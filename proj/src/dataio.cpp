#include "tbma/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <random>
#include <string>

#include "tbma/errors.hpp"
#include "tbma/rng.hpp"

namespace tbma {

void Dataset::validate() const {
  if (n_dims <= 0 || n_classes < 1) {
    throw ConsistencyError("dataset: n_dims and n_classes must be positive");
  }
  if (features.size() != labels.size() * static_cast<std::size_t>(n_dims)) {
    throw ConsistencyError("dataset: feature/label lengths differ");
  }
  for (int y : labels) {
    if (y < 0 || y >= n_classes) {
      throw ConsistencyError("dataset: label " + std::to_string(y) +
                             " outside [0, " + std::to_string(n_classes) + ")");
    }
  }
  for (double x : features) {
    if (!std::isfinite(x)) throw ConsistencyError("dataset: non-finite feature");
  }
}

namespace {

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<unsigned char>& buf, std::size_t at,
                        const std::filesystem::path& path) {
  if (buf.size() < at + 4) {
    throw LengthError(path.string() + ": truncated IDX header");
  }
  return (std::uint32_t{buf[at]} << 24) | (std::uint32_t{buf[at + 1]} << 16) |
         (std::uint32_t{buf[at + 2]} << 8) | std::uint32_t{buf[at + 3]};
}

void put_be32(std::ofstream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                         static_cast<char>(v >> 8), static_cast<char>(v)};
  out.write(bytes, 4);
}

}  // namespace

Dataset load_idx(const std::filesystem::path& images,
                 const std::filesystem::path& labels, int n_classes) {
  const auto img = read_file(images);
  const auto lab = read_file(labels);

  const std::uint32_t img_magic = read_be32(img, 0, images);
  if (img_magic != kIdxImagesMagic) {
    throw FormatError(images.string() + ": bad image magic");
  }
  const std::uint32_t lab_magic = read_be32(lab, 0, labels);
  if (lab_magic != kIdxLabelsMagic) {
    throw FormatError(labels.string() + ": bad label magic");
  }

  const std::size_t count = read_be32(img, 4, images);
  const std::size_t rows = read_be32(img, 8, images);
  const std::size_t cols = read_be32(img, 12, images);
  const std::size_t label_count = read_be32(lab, 4, labels);
  if (count != label_count) {
    throw ConsistencyError("IDX image count " + std::to_string(count) +
                           " != label count " + std::to_string(label_count));
  }

  const std::size_t dims = rows * cols;
  if (img.size() < 16 + count * dims) {
    throw LengthError(images.string() + ": truncated pixel data");
  }
  if (lab.size() < 8 + count) {
    throw LengthError(labels.string() + ": truncated label data");
  }

  Dataset data;
  data.n_dims = static_cast<int>(dims);
  data.n_classes = n_classes;
  data.features.resize(count * dims);
  for (std::size_t i = 0; i < count * dims; ++i) {
    data.features[i] = img[16 + i] / 255.0;
  }
  data.labels.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const int y = lab[8 + i];
    if (y >= n_classes) {
      throw FormatError(labels.string() + ": label " + std::to_string(y) +
                        " outside [0, " + std::to_string(n_classes) + ")");
    }
    data.labels[i] = y;
  }
  return data;
}

void write_idx(const Dataset& data, int rows, int cols,
               const std::filesystem::path& images,
               const std::filesystem::path& labels) {
  if (rows * cols != data.n_dims) {
    throw ShapeError("write_idx: rows * cols != n_dims");
  }
  std::ofstream img(images, std::ios::binary);
  std::ofstream lab(labels, std::ios::binary);
  if (!img || !lab) throw std::runtime_error("write_idx: cannot open output");

  const auto count = static_cast<std::uint32_t>(data.size());
  put_be32(img, kIdxImagesMagic);
  put_be32(img, count);
  put_be32(img, static_cast<std::uint32_t>(rows));
  put_be32(img, static_cast<std::uint32_t>(cols));
  for (double x : data.features) {
    const long px = std::lround(std::clamp(x, 0.0, 1.0) * 255.0);
    img.put(static_cast<char>(px));
  }

  put_be32(lab, kIdxLabelsMagic);
  put_be32(lab, count);
  for (int y : data.labels) lab.put(static_cast<char>(y));
}

Dataset synthetic(std::uint64_t seed, int n_samples, int n_dims, int n_classes,
                  double separation) {
  if (n_classes < 2) throw ConfigError("synthetic: need n_classes >= 2");
  if (!(separation > 0.0)) throw ConfigError("synthetic: separation must be > 0");
  if (n_samples < 1 || n_dims < 1) {
    throw ConfigError("synthetic: n_samples and n_dims must be positive");
  }

  auto rng = make_rng(seed, {kDataStream});
  std::normal_distribution<double> gauss(0.0, 1.0);

  const auto dims = static_cast<std::size_t>(n_dims);
  std::vector<double> centers(static_cast<std::size_t>(n_classes) * dims);
  for (int c = 0; c < n_classes; ++c) {
    double norm2 = 0.0;
    auto* u = centers.data() + static_cast<std::size_t>(c) * dims;
    for (std::size_t d = 0; d < dims; ++d) {
      u[d] = gauss(rng);
      norm2 += u[d] * u[d];
    }
    const double scale = separation / std::sqrt(norm2);
    for (std::size_t d = 0; d < dims; ++d) u[d] *= scale;
  }

  Dataset data;
  data.n_dims = n_dims;
  data.n_classes = n_classes;
  data.labels.resize(static_cast<std::size_t>(n_samples));
  data.features.resize(static_cast<std::size_t>(n_samples) * dims);
  for (int i = 0; i < n_samples; ++i) {
    const int c = i % n_classes;
    data.labels[i] = c;
    const auto* u = centers.data() + static_cast<std::size_t>(c) * dims;
    auto* x = data.features.data() + static_cast<std::size_t>(i) * dims;
    for (std::size_t d = 0; d < dims; ++d) x[d] = u[d] + gauss(rng);
  }

  const auto [lo_it, hi_it] =
      std::minmax_element(data.features.begin(), data.features.end());
  const double lo = *lo_it;
  const double span = *hi_it - lo;
  for (double& x : data.features) x = span > 0.0 ? (x - lo) / span : 0.5;
  return data;
}

Dataset slice(const Dataset& data, std::size_t begin, std::size_t end) {
  if (begin > end || end > data.size()) {
    throw IndexError("slice: bad range");
  }
  Dataset out;
  out.n_dims = data.n_dims;
  out.n_classes = data.n_classes;
  const auto dims = static_cast<std::size_t>(data.n_dims);
  out.features.assign(data.features.begin() + begin * dims,
                      data.features.begin() + end * dims);
  out.labels.assign(data.labels.begin() + begin, data.labels.begin() + end);
  return out;
}

std::vector<std::vector<std::size_t>> shard(const Dataset& data, int n_shards,
                                            ShardScheme scheme,
                                            std::uint64_t seed) {
  if (n_shards < 1 || static_cast<std::size_t>(n_shards) > data.size()) {
    throw ConfigError("shard: need 1 <= K <= n_samples, got K = " +
                      std::to_string(n_shards));
  }
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (scheme == ShardScheme::Iid) {
    auto rng = make_rng(seed, {kShardStream});
    std::shuffle(order.begin(), order.end(), rng);
  } else {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return data.labels[a] < data.labels[b];
                     });
  }
  const std::size_t per = data.size() / static_cast<std::size_t>(n_shards);
  std::vector<std::vector<std::size_t>> shards(static_cast<std::size_t>(n_shards));
  for (std::size_t k = 0; k < shards.size(); ++k) {
    shards[k].assign(order.begin() + k * per, order.begin() + (k + 1) * per);
  }
  return shards;
}

}  // namespace tbma
