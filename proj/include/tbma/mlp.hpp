#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tbma/dataio.hpp"
#include "tbma/rng.hpp"

namespace tbma {

// One-hidden-layer perceptron: inputs -> hidden (ReLU) -> classes (softmax).
struct Arch {
  int inputs = 784;
  int hidden = 32;
  int classes = 10;

  // W1 (hidden x inputs, row-major), b1 (hidden), W2 (classes x hidden,
  // row-major), b2 (classes), concatenated in that order.
  std::size_t parameter_count() const;
  std::size_t w1_offset() const { return 0; }
  std::size_t b1_offset() const;
  std::size_t w2_offset() const;
  std::size_t b2_offset() const;

  void validate() const;
  bool operator==(const Arch&) const = default;
};

// Flat parameter vector of one model. The layout is shared by every device.
struct ModelVector {
  std::vector<double> values;
  Arch layout;

  std::size_t size() const { return values.size(); }
};

/// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero.
/// Throws ConfigError for a non-positive dimension.
ModelVector init_model(const Arch& arch, std::uint64_t seed);

/// Mean softmax cross-entropy over `indices` and, when `grad` is non-empty,
/// its gradient with respect to every parameter (written into `grad`).
double loss_and_gradient(const ModelVector& model, const Dataset& data,
                         std::span<const std::size_t> indices,
                         std::span<double> grad);

/// Class scores (pre-softmax) for one sample.
std::vector<double> forward(const ModelVector& model,
                            std::span<const double> features);

/// argmax of the scores, ties resolved to the lowest class index.
int predict(const ModelVector& model, std::span<const double> features);

/// Fraction of `test` classified correctly. Throws ConfigError when empty.
double evaluate(const ModelVector& model, const Dataset& test);

struct TrainOptions {
  int epochs = 3;
  double learning_rate = 0.03;
  int batch_size = 20;
};

// Identifies the caller in divergence errors.
struct TrainContext {
  int device = -1;
  int round = -1;
};

/// Mini-batch SGD over `shard` (indices into `data`), reshuffled every epoch
/// from `rng`. Throws DivergenceError when the loss or an update turns
/// non-finite.
ModelVector local_train(ModelVector model, const Dataset& data,
                        std::span<const std::size_t> shard,
                        const TrainOptions& options, Rng& rng,
                        TrainContext context = {});

}  // namespace tbma
