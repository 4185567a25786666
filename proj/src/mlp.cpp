#include "tbma/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "tbma/errors.hpp"

namespace tbma {

namespace {

std::size_t sz(int v) { return static_cast<std::size_t>(v); }

}  // namespace

std::size_t Arch::b1_offset() const { return sz(hidden) * sz(inputs); }
std::size_t Arch::w2_offset() const { return b1_offset() + sz(hidden); }
std::size_t Arch::b2_offset() const { return w2_offset() + sz(classes) * sz(hidden); }
std::size_t Arch::parameter_count() const { return b2_offset() + sz(classes); }

void Arch::validate() const {
  if (inputs < 1 || hidden < 1 || classes < 2) {
    throw ConfigError("model arch needs inputs >= 1, hidden >= 1, classes >= 2");
  }
}

ModelVector init_model(const Arch& arch, std::uint64_t seed) {
  arch.validate();
  ModelVector model{std::vector<double>(arch.parameter_count(), 0.0), arch};
  auto rng = make_rng(seed, {kInitStream});

  const double r1 = 1.0 / std::sqrt(static_cast<double>(arch.inputs));
  std::uniform_real_distribution<double> u1(-r1, r1);
  for (std::size_t i = 0; i < arch.b1_offset(); ++i) model.values[i] = u1(rng);

  const double r2 = 1.0 / std::sqrt(static_cast<double>(arch.hidden));
  std::uniform_real_distribution<double> u2(-r2, r2);
  for (std::size_t i = arch.w2_offset(); i < arch.b2_offset(); ++i) {
    model.values[i] = u2(rng);
  }
  return model;
}

namespace {

// Scratch buffers for one forward/backward pass.
struct Activations {
  std::vector<double> hidden;  // post-ReLU
  std::vector<double> scores;

  explicit Activations(const Arch& a) : hidden(sz(a.hidden)), scores(sz(a.classes)) {}
};

void forward_into(const ModelVector& model, std::span<const double> x,
                  Activations& act) {
  const Arch& a = model.layout;
  const double* w1 = model.values.data() + a.w1_offset();
  const double* b1 = model.values.data() + a.b1_offset();
  const double* w2 = model.values.data() + a.w2_offset();
  const double* b2 = model.values.data() + a.b2_offset();

  for (int h = 0; h < a.hidden; ++h) {
    const double* row = w1 + sz(h) * sz(a.inputs);
    double z = b1[h];
    for (int i = 0; i < a.inputs; ++i) z += row[i] * x[i];
    act.hidden[h] = z > 0.0 ? z : 0.0;
  }
  for (int c = 0; c < a.classes; ++c) {
    const double* row = w2 + sz(c) * sz(a.hidden);
    double z = b2[c];
    for (int h = 0; h < a.hidden; ++h) z += row[h] * act.hidden[h];
    act.scores[c] = z;
  }
}

void check_input(const ModelVector& model, const Dataset& data) {
  if (model.values.size() != model.layout.parameter_count()) {
    throw ShapeError("model vector length does not match its layout");
  }
  if (data.n_dims != model.layout.inputs) {
    throw ShapeError("dataset has " + std::to_string(data.n_dims) +
                     " features, model expects " +
                     std::to_string(model.layout.inputs));
  }
}

}  // namespace

double loss_and_gradient(const ModelVector& model, const Dataset& data,
                         std::span<const std::size_t> indices,
                         std::span<double> grad) {
  check_input(model, data);
  const Arch& a = model.layout;
  const bool want_grad = !grad.empty();
  if (want_grad) {
    if (grad.size() != model.size()) {
      throw ShapeError("gradient buffer length does not match the model");
    }
    std::fill(grad.begin(), grad.end(), 0.0);
  }
  if (indices.empty()) return 0.0;

  const double* w2 = model.values.data() + a.w2_offset();
  Activations act(a);
  std::vector<double> d_scores(sz(a.classes));
  std::vector<double> d_hidden(sz(a.hidden));
  double total = 0.0;

  for (std::size_t idx : indices) {
    const auto x = data.row(idx);
    const int y = data.labels[idx];
    forward_into(model, x, act);

    const double peak = *std::max_element(act.scores.begin(), act.scores.end());
    double denom = 0.0;
    for (int c = 0; c < a.classes; ++c) {
      d_scores[c] = std::exp(act.scores[c] - peak);
      denom += d_scores[c];
    }
    total += std::log(denom) - (act.scores[y] - peak);
    if (!want_grad) continue;

    for (int c = 0; c < a.classes; ++c) d_scores[c] /= denom;
    d_scores[y] -= 1.0;

    double* g_w2 = grad.data() + a.w2_offset();
    double* g_b2 = grad.data() + a.b2_offset();
    std::fill(d_hidden.begin(), d_hidden.end(), 0.0);
    for (int c = 0; c < a.classes; ++c) {
      const double dc = d_scores[c];
      g_b2[c] += dc;
      double* g_row = g_w2 + sz(c) * sz(a.hidden);
      const double* w_row = w2 + sz(c) * sz(a.hidden);
      for (int h = 0; h < a.hidden; ++h) {
        g_row[h] += dc * act.hidden[h];
        d_hidden[h] += dc * w_row[h];
      }
    }

    double* g_w1 = grad.data() + a.w1_offset();
    double* g_b1 = grad.data() + a.b1_offset();
    for (int h = 0; h < a.hidden; ++h) {
      if (act.hidden[h] <= 0.0) continue;
      const double dh = d_hidden[h];
      g_b1[h] += dh;
      double* g_row = g_w1 + sz(h) * sz(a.inputs);
      for (int i = 0; i < a.inputs; ++i) g_row[i] += dh * x[i];
    }
  }

  const double inv = 1.0 / static_cast<double>(indices.size());
  if (want_grad) {
    for (double& g : grad) g *= inv;
  }
  return total * inv;
}

std::vector<double> forward(const ModelVector& model,
                            std::span<const double> features) {
  if (features.size() != sz(model.layout.inputs)) {
    throw ShapeError("forward: feature length does not match the model");
  }
  Activations act(model.layout);
  forward_into(model, features, act);
  return act.scores;
}

int predict(const ModelVector& model, std::span<const double> features) {
  const auto scores = forward(model, features);
  return static_cast<int>(std::max_element(scores.begin(), scores.end()) -
                          scores.begin());
}

double evaluate(const ModelVector& model, const Dataset& test) {
  if (test.size() == 0) throw ConfigError("evaluate: empty test set");
  check_input(model, test);
  Activations act(model.layout);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    forward_into(model, test.row(i), act);
    const auto best = std::max_element(act.scores.begin(), act.scores.end()) -
                      act.scores.begin();
    if (best == test.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

ModelVector local_train(ModelVector model, const Dataset& data,
                        std::span<const std::size_t> shard,
                        const TrainOptions& options, Rng& rng,
                        TrainContext context) {
  if (options.epochs <= 0) return model;
  if (shard.empty()) throw ConfigError("local_train: empty shard");
  if (options.batch_size < 1 || !(options.learning_rate > 0.0)) {
    throw ConfigError("local_train: need batch_size >= 1 and learning_rate > 0");
  }

  std::vector<std::size_t> order(shard.begin(), shard.end());
  std::vector<double> grad(model.size());
  const auto batch = static_cast<std::size_t>(options.batch_size);

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t len = std::min(batch, order.size() - start);
      const double loss = loss_and_gradient(
          model, data, std::span(order).subspan(start, len), grad);
      if (!std::isfinite(loss)) {
        throw DivergenceError("local training diverged (device " +
                                  std::to_string(context.device) + ", round " +
                                  std::to_string(context.round) + ")",
                              context.device, context.round);
      }
      for (std::size_t i = 0; i < grad.size(); ++i) {
        model.values[i] -= options.learning_rate * grad[i];
      }
    }
  }
  for (double w : model.values) {
    if (!std::isfinite(w)) {
      throw DivergenceError("non-finite parameter after local training (device " +
                                std::to_string(context.device) + ", round " +
                                std::to_string(context.round) + ")",
                            context.device, context.round);
    }
  }
  return model;
}

}  // namespace tbma
