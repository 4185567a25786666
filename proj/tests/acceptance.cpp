// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance <path to tbma cli>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tbma/channel.hpp"
#include "tbma/errors.hpp"
#include "tbma/experiment.hpp"
#include "tbma/feel.hpp"
#include "tbma/mlp.hpp"
#include "tbma/modem.hpp"
#include "tbma/receiver.hpp"

using namespace tbma;
namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass;
  std::string detail;
};

int run_criterion(int id, const std::string& name, double budget_s,
                  const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o{false, ""};
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0 && secs > budget_s) {
    o.pass = false;
    o.detail += " [over time budget]";
  }
  std::printf("%s %d %s (%.2fs) %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(),
              secs, o.detail.c_str());
  std::fflush(stdout);
  return o.pass ? 0 : 1;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Outcome gram() {
  double worst_w = 0.0;
  double worst_u = 0.0;
  for (int n : {2, 8, 32, 256}) {
    const ToneFamily fam(n, 1.0);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        double w = 0.0;
        double u = 0.0;
        for (int t = 0; t < n; ++t) {
          const double p = fam.at(a, t) * fam.at(b, t);
          w += ToneFamily::weight(t) * p;
          u += p;
        }
        const double delta = a == b ? 1.0 : 0.0;
        worst_w = std::max(worst_w, std::abs(w - delta));
        worst_u = std::max(worst_u, std::abs(u - delta - 1.0 / n));
      }
    }
  }
  return {worst_w <= 1e-9 && worst_u <= 1e-9,
          "max dev weighted " + fmt("%.2e", worst_w) + ", unweighted " + fmt("%.2e", worst_u)};
}

Outcome noiseless_type() {
  const int k = 50;
  const int n = 32;
  const QuantizerSpec spec{n, -1.0, 1.0};
  const ToneFamily fam(n);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double count_err = 0.0;
  double mean_err = 0.0;
  std::vector<double> rx(n);
  std::vector<double> scores(n);
  const Arch arch{3, 2, 2};  // 16 parameters per device
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ModelVector> models;
    for (int d = 0; d < k; ++d) {
      ModelVector m{std::vector<double>(arch.parameter_count()), arch};
      for (double& v : m.values) v = u(rng);
      models.push_back(std::move(m));
    }
    for (std::size_t q = 0; q < arch.parameter_count(); ++q) {
      std::fill(rx.begin(), rx.end(), 0.0);
      std::vector<int> levels;
      for (const auto& m : models) {
        levels.push_back(quantize(m.values[q], spec));
        fam.add_tone(levels.back(), rx);
      }
      correlate_bank_into(rx, fam, scores);
      const auto truth = level_histogram(levels, n);
      for (int i = 0; i < n; ++i) count_err = std::max(count_err, std::abs(scores[i] - truth[i]));
    }
    const auto r = aggregate_tbma(models, models[0], spec, fam, {kInf, 0});
    for (std::size_t q = 0; q < arch.parameter_count(); ++q) {
      double direct = 0.0;
      for (const auto& m : models) direct += reconstruct(quantize(m.values[q], spec), spec);
      direct /= k;
      mean_err = std::max(mean_err, std::abs(r.model.values[q] - direct));
    }
  }
  return {count_err <= 1e-9 && mean_err <= 1e-9,
          "max count err " + fmt("%.2e", count_err) + ", max mean err " + fmt("%.2e", mean_err)};
}

Outcome papr() {
  ExperimentConfig cfg = parse_config_text("{}");
  cfg.papr.n_symbols = 100000;
  const auto rows = papr_report(cfg);
  const double mfsk = rows.at(0).papr_db;
  const double dsb = rows.at(1).papr_db;
  return {mfsk == 0.0 && dsb >= 10.0,
          "mfsk " + fmt("%.6g", mfsk) + " dB, dsb " + fmt("%.4g", dsb) + " dB"};
}

// Received block for the given levels at one SNR, then the mean estimate.
double estimate_mean(const std::vector<int>& levels, const QuantizerSpec& spec,
                     const ToneFamily& fam, double snr_db, Rng& noise,
                     std::vector<double>& rx, std::vector<double>& scores,
                     std::vector<double>* counts = nullptr) {
  std::fill(rx.begin(), rx.end(), 0.0);
  for (int m : levels) fam.add_tone(m, rx);
  const int k = static_cast<int>(levels.size());
  add_awgn_inplace(rx, channel_sigma({snr_db, 0}, fam.sample_power(), k), noise);
  correlate_bank_into(rx, fam, scores);
  const auto hist = estimate_type(scores, k);
  if (counts) *counts = hist.counts;
  try {
    return mean_from_type(hist, spec);
  } catch (const DegenerateTypeError&) {
    return 0.0;
  }
}

Outcome snr_consistency() {
  const int k = 50;
  const int n = 32;
  const QuantizerSpec spec{n, -1.0, 1.0};
  const ToneFamily fam(n);
  std::vector<double> rx(n);
  std::vector<double> scores(n);
  std::string detail = "mse";
  double prev = kInf;
  bool ok = true;
  for (double snr : {-20.0, -10.0, 0.0, 10.0, 20.0}) {
    double se = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      auto pick = make_rng(99, {1, static_cast<std::uint64_t>(trial)});
      auto noise = make_rng(99, {2, static_cast<std::uint64_t>(trial)});
      std::uniform_int_distribution<int> lvl(0, n - 1);
      std::vector<int> levels(k);
      double truth = 0.0;
      for (int& m : levels) {
        m = lvl(pick);
        truth += reconstruct(m, spec);
      }
      truth /= k;
      const double est = estimate_mean(levels, spec, fam, snr, noise, rx, scores);
      se += (est - truth) * (est - truth);
    }
    const double mse = se / 200;
    detail += " " + fmt("%.3g", snr) + "dB:" + fmt("%.3e", mse);
    // Walking up in SNR the error must not grow.
    if (mse > prev) ok = false;
    prev = mse;
  }
  return {ok, detail};
}

Outcome k_over_n() {
  const int k = 50;
  double tv[2] = {0.0, 0.0};
  const int sizes[2] = {32, 256};
  const int n_seeds = 100;
  for (int i = 0; i < 2; ++i) {
    const int n = sizes[i];
    const QuantizerSpec spec{n, -1.0, 1.0};
    const ToneFamily fam(n);
    std::vector<double> rx(n);
    std::vector<double> scores(n);
    std::vector<double> counts;
    for (int seed = 0; seed < n_seeds; ++seed) {
      auto pick = make_rng(seed, {1});
      auto noise = make_rng(seed, {2});
      std::normal_distribution<double> g(0.0, 0.3);
      std::vector<int> levels(k);
      for (int& m : levels) m = quantize(g(pick), spec);
      estimate_mean(levels, spec, fam, 0.0, noise, rx, scores, &counts);
      tv[i] += total_variation(counts, level_histogram(levels, n));
    }
    tv[i] /= n_seeds;
  }
  return {tv[0] < tv[1], "mean TV N=32 " + fmt("%.4f", tv[0]) + ", N=256 " + fmt("%.4f", tv[1])};
}

// Desk-scale FEEL settings shared by every part of criterion 6.
FeelConfig feel_config(const ExperimentConfig& base, Aggregation agg, double snr,
                       std::uint64_t seed) {
  return trial_config(base, {agg, 32, snr, seed});
}

Outcome feel() {
  ExperimentConfig cfg = parse_config_text(R"({
    "n_devices": 10, "rounds": 20, "hidden": 32,
    "local_epochs": 3, "learning_rate": 0.03,
    "quantizer": {"lo": -0.125, "hi": 0.125},
    "dataset": {"n_train": 2000, "n_test": 500, "separation": 16}
  })");
  const auto [train, test] = load_datasets(cfg.dataset);

  const auto ideal = run_feel(feel_config(cfg, Aggregation::Ideal, 10.0, 1), train, test);
  const auto tbma = run_feel(feel_config(cfg, Aggregation::Tbma, 10.0, 1), train, test);
  const double a_ideal = ideal.back().accuracy;
  const double a_tbma = tbma.back().accuracy;
  const bool a_ok = a_ideal >= 0.85;
  const bool b_ok = a_ideal - a_tbma <= 0.02;

  std::string detail = "ideal " + fmt("%.3f", a_ideal) + ", tbma@10dB " + fmt("%.3f", a_tbma) +
                       ", mean final over 5 seeds:";
  bool c_ok = true;
  double prev = kInf;
  for (double snr : {20.0, 0.0, -10.0, -20.0}) {
    double acc = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      acc += run_feel(feel_config(cfg, Aggregation::Tbma, snr, seed), train, test).back().accuracy;
    }
    acc /= 5;
    detail += " " + fmt("%.3g", snr) + "dB:" + fmt("%.4f", acc);
    if (acc > prev) c_ok = false;
    prev = acc;
  }
  detail += std::string(" (a ") + (a_ok ? "ok" : "fail") + ", b " + (b_ok ? "ok" : "fail") +
            ", c " + (c_ok ? "ok" : "fail") + ")";
  return {a_ok && b_ok && c_ok, detail};
}

Outcome gradient() {
  const Arch arch{5, 4, 3};
  const auto data = synthetic(3, 12, 5, 3, 2.0);
  ModelVector model = init_model(arch, 17);
  std::vector<std::size_t> idx(data.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<double> grad(model.size());
  loss_and_gradient(model, data, idx, grad);

  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> pick(0, model.size() - 1);
  const double h = 1e-5;
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const std::size_t q = pick(rng);
    ModelVector plus = model;
    ModelVector minus = model;
    plus.values[q] += h;
    minus.values[q] -= h;
    const double fd = (loss_and_gradient(plus, data, idx, {}) -
                       loss_and_gradient(minus, data, idx, {})) / (2 * h);
    const double scale = std::max({std::abs(fd), std::abs(grad[q]), 1e-8});
    worst = std::max(worst, std::abs(fd - grad[q]) / scale);
  }
  return {worst <= 1e-5, "max relative error " + fmt("%.2e", worst)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism(const std::string& cli) {
  const auto root = fs::temp_directory_path() / "tbma_acceptance_det";
  fs::remove_all(root);
  fs::create_directories(root);
  const auto config = root / "config.json";
  std::ofstream(config) << R"({
  "n_devices": 10,
  "rounds": 3,
  "dataset": {"n_train": 500, "n_test": 200},
  "sweep": {"snr_db": [-10, 10], "n_levels": [8, 32],
            "aggregation": ["tbma", "dsb", "ideal"], "seeds": [1, 2]}
}
)";
  std::string metrics[2];
  const int threads[2] = {1, 4};
  for (int i = 0; i < 2; ++i) {
    const auto out = root / ("run" + std::to_string(i));
    const std::string cmd = "\"" + cli + "\" run \"" + config.string() + "\" --out-dir \"" +
                            out.string() + "\" --threads " + std::to_string(threads[i]) +
                            " --quiet";
    if (std::system(cmd.c_str()) != 0) return {false, "cli run failed: " + cmd};
    metrics[i] = slurp(out / "metrics.csv");
  }
  const bool same = !metrics[0].empty() && metrics[0] == metrics[1];
  fs::remove_all(root);
  return {same, std::to_string(metrics[0].size()) + " bytes, threads 1 vs 4 " +
                    (same ? "identical" : "differ")};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <tbma cli>\n");
    return 2;
  }
  const std::string cli = argv[1];
  int failures = 0;
  failures += run_criterion(1, "tone family orthonormality", 5, gram);
  failures += run_criterion(2, "noiseless type exactness", 10, noiseless_type);
  failures += run_criterion(3, "PAPR mfsk 0 dB, dsb >= 10 dB", 10, papr);
  failures += run_criterion(4, "mean MSE non-increasing in SNR", 120, snr_consistency);
  failures += run_criterion(5, "K>N histogram recovery", 120, k_over_n);
  failures += run_criterion(6, "FEEL desk-scale convergence", 300, feel);
  failures += run_criterion(7, "gradient vs finite differences", 5, gradient);
  failures += run_criterion(8, "byte-identical metrics across threads", 0,
                            [&] { return determinism(cli); });
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
