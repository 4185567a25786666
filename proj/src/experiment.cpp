#include "tbma/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "tbma/errors.hpp"
#include "tbma/rng.hpp"
#include "tbma/svg_chart.hpp"

namespace tbma {

using nlohmann::json;

namespace {

// Reads the keys of one JSON object, remembering which were consumed so that
// leftovers can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw SchemaError(where() + "must be an object");
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw SchemaError("field \"" + field(key) + "\" has the wrong type");
    }
  }

  const json* child(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) {
        throw SchemaError("unknown key \"" + field(key) + "\"");
      }
    }
  }

 private:
  std::string where() const { return path_.empty() ? "config " : "\"" + path_ + "\" "; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename T>
void require(bool ok, const std::string& field, const T& message) {
  if (!ok) throw SchemaError("field \"" + field + "\": " + message);
}

Normalization normalization_from_string(const std::string& s) {
  if (s == "declared_k") return Normalization::DeclaredK;
  if (s == "histogram_sum") return Normalization::HistogramSum;
  throw SchemaError("field \"normalization\": expected declared_k or histogram_sum");
}

std::string to_string(Normalization n) {
  return n == Normalization::DeclaredK ? "declared_k" : "histogram_sum";
}

ShardScheme partition_from_string(const std::string& s) {
  if (s == "iid") return ShardScheme::Iid;
  if (s == "label_sorted") return ShardScheme::LabelSorted;
  throw SchemaError("field \"partition\": expected iid or label_sorted");
}

std::string to_string(ShardScheme s) {
  return s == ShardScheme::Iid ? "iid" : "label_sorted";
}

SnrReference reference_from_string(const std::string& s) {
  if (s == "per_device") return SnrReference::PerDevice;
  if (s == "aggregate") return SnrReference::Aggregate;
  throw SchemaError("field \"snr_reference\": expected per_device or aggregate");
}

std::string to_string(SnrReference r) {
  return r == SnrReference::PerDevice ? "per_device" : "aggregate";
}

void line_column(const std::string& text, std::size_t byte, std::size_t& line,
                 std::size_t& column) {
  line = 1;
  column = 1;
  const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 0;
    std::size_t column = 0;
    line_column(text, e.byte, line, column);
    throw SchemaError("syntax error at line " + std::to_string(line) +
                      ", column " + std::to_string(column) + ": " + e.what());
  }

  ExperimentConfig cfg;
  FeelConfig& base = cfg.base;
  cfg.sweep = {{10.0}, {32}, {Aggregation::Tbma}, {1}};

  ObjectReader top(root, "");
  top.get("n_devices", base.n_devices);
  top.get("rounds", base.rounds);
  top.get("local_epochs", base.train.epochs);
  top.get("learning_rate", base.train.learning_rate);
  top.get("batch_size", base.train.batch_size);
  top.get("hidden", base.arch.hidden);
  top.get("device_threads", base.threads);
  top.get("record_wall_time", base.record_wall_time);
  top.get("output_dir", cfg.output_dir);

  std::string norm = to_string(base.normalization);
  top.get("normalization", norm);
  base.normalization = normalization_from_string(norm);
  std::string partition = to_string(base.partition);
  top.get("partition", partition);
  base.partition = partition_from_string(partition);
  std::string reference = to_string(base.channel.reference);
  top.get("snr_reference", reference);
  base.channel.reference = reference_from_string(reference);

  if (const json* q = top.child("quantizer")) {
    ObjectReader r(*q, "quantizer");
    r.get("lo", base.quantizer.lo);
    r.get("hi", base.quantizer.hi);
    r.finish();
  }

  if (const json* s = top.child("sweep")) {
    ObjectReader r(*s, "sweep");
    r.get("snr_db", cfg.sweep.snr_db);
    r.get("n_levels", cfg.sweep.n_levels);
    r.get("seeds", cfg.sweep.seeds);
    std::vector<std::string> aggs;
    for (auto a : cfg.sweep.aggregation) aggs.push_back(to_string(a));
    r.get("aggregation", aggs);
    r.finish();
    cfg.sweep.aggregation.clear();
    for (const auto& a : aggs) {
      try {
        cfg.sweep.aggregation.push_back(aggregation_from_string(a));
      } catch (const ConfigError&) {
        throw SchemaError("field \"sweep.aggregation\": unknown scheme \"" + a + "\"");
      }
    }
  }

  if (const json* d = top.child("dataset")) {
    DatasetSource& ds = cfg.dataset;
    ObjectReader r(*d, "dataset");
    std::string source = "synthetic";
    r.get("source", source);
    if (source == "synthetic") {
      ds.kind = DatasetSource::Kind::Synthetic;
    } else if (source == "mnist") {
      ds.kind = DatasetSource::Kind::Mnist;
      ds.n_dims = 784;
    } else {
      throw SchemaError("field \"dataset.source\": expected synthetic or mnist");
    }
    r.get("n_train", ds.n_train);
    r.get("n_test", ds.n_test);
    r.get("seed", ds.seed);
    r.get("n_dims", ds.n_dims);
    r.get("n_classes", ds.n_classes);
    r.get("separation", ds.separation);
    r.get("train_images", ds.train_images);
    r.get("train_labels", ds.train_labels);
    r.get("test_images", ds.test_images);
    r.get("test_labels", ds.test_labels);
    r.finish();
  }

  if (const json* p = top.child("papr")) {
    ObjectReader r(*p, "papr");
    r.get("n_symbols", cfg.papr.n_symbols);
    r.get("seed", cfg.papr.seed);
    r.get("n_levels", cfg.papr.n_levels);
    r.finish();
  }
  top.finish();

  // Semantic checks.
  require(!cfg.sweep.snr_db.empty(), "sweep.snr_db", "empty sweep axis");
  require(!cfg.sweep.n_levels.empty(), "sweep.n_levels", "empty sweep axis");
  require(!cfg.sweep.aggregation.empty(), "sweep.aggregation", "empty sweep axis");
  require(!cfg.sweep.seeds.empty(), "sweep.seeds", "empty sweep axis");
  for (int n : cfg.sweep.n_levels) require(n >= 2, "sweep.n_levels", "levels must be >= 2");
  for (double s : cfg.sweep.snr_db) require(std::isfinite(s), "sweep.snr_db", "must be finite");
  require(base.n_devices >= 1, "n_devices", "must be >= 1");
  require(base.rounds >= 0, "rounds", "must be >= 0");
  require(base.train.epochs >= 0, "local_epochs", "must be >= 0");
  require(base.train.learning_rate > 0.0, "learning_rate", "must be > 0");
  require(base.train.batch_size >= 1, "batch_size", "must be >= 1");
  require(base.arch.hidden >= 1, "hidden", "must be >= 1");
  require(base.threads >= 1, "device_threads", "must be >= 1");
  require(base.quantizer.hi > base.quantizer.lo, "quantizer", "need lo < hi");
  require(cfg.dataset.n_train >= base.n_devices, "dataset.n_train",
          "must be >= n_devices");
  require(cfg.dataset.n_test >= 1, "dataset.n_test", "must be >= 1");
  require(cfg.dataset.n_classes >= 2, "dataset.n_classes", "must be >= 2");
  require(cfg.dataset.n_dims >= 1, "dataset.n_dims", "must be >= 1");
  require(cfg.dataset.separation > 0.0, "dataset.separation", "must be > 0");
  if (cfg.dataset.kind == DatasetSource::Kind::Mnist) {
    require(!cfg.dataset.train_images.empty() && !cfg.dataset.train_labels.empty() &&
                !cfg.dataset.test_images.empty() && !cfg.dataset.test_labels.empty(),
            "dataset", "mnist source needs train/test image and label paths");
    require(cfg.dataset.n_dims == 784, "dataset.n_dims", "mnist images are 784-dimensional");
  }
  require(cfg.papr.n_symbols >= 1, "papr.n_symbols", "must be >= 1");
  require(cfg.papr.n_levels >= 3, "papr.n_levels", "must be >= 3");
  require(!cfg.output_dir.empty(), "output_dir", "must not be empty");

  base.arch.inputs = cfg.dataset.n_dims;
  base.arch.classes = cfg.dataset.n_classes;
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string resolved_config_json(const ExperimentConfig& cfg) {
  const FeelConfig& b = cfg.base;
  json j;
  j["n_devices"] = b.n_devices;
  j["rounds"] = b.rounds;
  j["local_epochs"] = b.train.epochs;
  j["learning_rate"] = b.train.learning_rate;
  j["batch_size"] = b.train.batch_size;
  j["hidden"] = b.arch.hidden;
  j["device_threads"] = b.threads;
  j["record_wall_time"] = b.record_wall_time;
  j["normalization"] = to_string(b.normalization);
  j["partition"] = to_string(b.partition);
  j["snr_reference"] = to_string(b.channel.reference);
  j["quantizer"] = {{"lo", b.quantizer.lo}, {"hi", b.quantizer.hi}};
  json aggs = json::array();
  for (auto a : cfg.sweep.aggregation) aggs.push_back(to_string(a));
  j["sweep"] = {{"snr_db", cfg.sweep.snr_db},
                {"n_levels", cfg.sweep.n_levels},
                {"aggregation", aggs},
                {"seeds", cfg.sweep.seeds}};
  const DatasetSource& d = cfg.dataset;
  json ds = {{"n_train", d.n_train}, {"n_test", d.n_test}};
  if (d.kind == DatasetSource::Kind::Synthetic) {
    ds["source"] = "synthetic";
    ds["seed"] = d.seed;
    ds["n_dims"] = d.n_dims;
    ds["n_classes"] = d.n_classes;
    ds["separation"] = d.separation;
  } else {
    ds["source"] = "mnist";
    ds["n_classes"] = d.n_classes;
    ds["train_images"] = d.train_images;
    ds["train_labels"] = d.train_labels;
    ds["test_images"] = d.test_images;
    ds["test_labels"] = d.test_labels;
  }
  j["dataset"] = ds;
  j["papr"] = {{"n_symbols", cfg.papr.n_symbols},
               {"seed", cfg.papr.seed},
               {"n_levels", cfg.papr.n_levels}};
  j["output_dir"] = cfg.output_dir;
  return j.dump(2) + "\n";
}

std::pair<Dataset, Dataset> load_datasets(const DatasetSource& source) {
  const auto n_train = static_cast<std::size_t>(source.n_train);
  const auto n_test = static_cast<std::size_t>(source.n_test);
  if (source.kind == DatasetSource::Kind::Synthetic) {
    const Dataset all = synthetic(source.seed, source.n_train + source.n_test,
                                  source.n_dims, source.n_classes,
                                  source.separation);
    return {slice(all, 0, n_train), slice(all, n_train, n_train + n_test)};
  }
  const Dataset train =
      load_idx(source.train_images, source.train_labels, source.n_classes);
  const Dataset test =
      load_idx(source.test_images, source.test_labels, source.n_classes);
  if (train.size() < n_train || test.size() < n_test) {
    throw ConfigError("MNIST files hold fewer samples than n_train/n_test");
  }
  return {slice(train, 0, n_train), slice(test, 0, n_test)};
}

std::vector<GridPoint> expand_grid(const SweepAxes& sweep) {
  std::vector<GridPoint> grid;
  for (auto a : sweep.aggregation) {
    for (int n : sweep.n_levels) {
      for (double snr : sweep.snr_db) {
        for (auto seed : sweep.seeds) grid.push_back({a, n, snr, seed});
      }
    }
  }
  return grid;
}

FeelConfig trial_config(const ExperimentConfig& config, const GridPoint& point) {
  FeelConfig c = config.base;
  c.aggregation = point.aggregation;
  c.quantizer.n_levels = point.n_levels;
  c.channel.snr_db = point.snr_db;
  c.seed = point.seed;
  // Shared across SNR points so the sweep compares like with like.
  c.channel.seed = derive_seed(point.seed, {kChannelSeed});
  return c;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string format_metrics_row(const GridPoint& p, const RoundMetrics& m) {
  std::ostringstream row;
  row << to_string(p.aggregation) << ',' << p.n_levels << ','
      << format_number(p.snr_db) << ',' << p.seed << ',' << m.round << ','
      << format_number(m.accuracy) << ',' << format_number(m.agg_error_vs_ideal)
      << ',' << m.fallback_count << ',' << format_number(m.saturation_fraction)
      << ',' << format_number(m.wall_ms);
  return row.str();
}

namespace {

struct TrialResult {
  std::vector<RoundMetrics> rounds;
  std::string error;
  bool done = false;
};

void write_chart(const std::filesystem::path& path,
                 const std::vector<GridPoint>& grid,
                 const std::vector<TrialResult>& results) {
  // (aggregation, n_levels) -> snr -> final accuracies over seeds
  std::map<std::pair<int, int>, std::map<double, std::vector<double>>> acc;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (results[i].rounds.empty()) continue;
    const auto& g = grid[i];
    acc[{static_cast<int>(g.aggregation), g.n_levels}][g.snr_db].push_back(
        results[i].rounds.back().accuracy);
  }
  std::vector<ChartSeries> series;
  for (const auto& [key, by_snr] : acc) {
    ChartSeries s;
    s.label = to_string(static_cast<Aggregation>(key.first)) + " N=" +
              std::to_string(key.second);
    for (const auto& [snr, values] : by_snr) {
      double sum = 0.0;
      for (double v : values) sum += v;
      s.x.push_back(snr);
      s.y.push_back(sum / static_cast<double>(values.size()));
      s.y_lo.push_back(*std::min_element(values.begin(), values.end()));
      s.y_hi.push_back(*std::max_element(values.begin(), values.end()));
    }
    series.push_back(std::move(s));
  }
  std::ofstream out(path);
  out << render_line_chart(series, "Final-round test accuracy vs SNR",
                           "SNR (dB)", "accuracy");
}

}  // namespace

int run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  namespace fs = std::filesystem;
  const fs::path out_dir(config.output_dir);
  fs::create_directories(out_dir);
  {
    std::ofstream resolved(out_dir / "resolved_config.json");
    resolved << resolved_config_json(config);
  }

  const auto [train, test] = load_datasets(config.dataset);
  const auto grid = expand_grid(config.sweep);
  std::vector<TrialResult> results(grid.size());

  std::ofstream csv(out_dir / "metrics.csv");
  if (!csv) throw std::runtime_error("cannot write metrics.csv in " + out_dir.string());
  csv << kMetricsHeader << '\n';

  std::mutex writer;
  std::size_t next_to_write = 0;
  // Writes every finished trial at the front of the queue, in grid order.
  auto flush_ready = [&] {
    while (next_to_write < grid.size() && results[next_to_write].done) {
      for (const auto& m : results[next_to_write].rounds) {
        csv << format_metrics_row(grid[next_to_write], m) << '\n';
      }
      ++next_to_write;
    }
    csv.flush();
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      TrialResult local;
      try {
        run_feel(trial_config(config, grid[i]), train, test,
                 [&](const RoundMetrics& m) { local.rounds.push_back(m); });
      } catch (const std::exception& e) {
        local.error = e.what();
      }
      local.done = true;
      std::lock_guard lock(writer);
      const auto& g = grid[i];
      if (!options.quiet || !local.error.empty()) {
        std::cerr << (local.error.empty() ? "done " : "FAILED ")
                  << to_string(g.aggregation) << " N=" << g.n_levels
                  << " snr=" << format_number(g.snr_db) << " seed=" << g.seed;
        if (!local.error.empty()) std::cerr << ": " << local.error;
        else if (!local.rounds.empty())
          std::cerr << " acc=" << format_number(local.rounds.back().accuracy);
        std::cerr << '\n';
      }
      results[i] = std::move(local);
      flush_ready();
    }
  };

  const auto n_threads = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::max(1, options.threads)), 1, grid.size());
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }

  write_chart(out_dir / "accuracy_vs_snr.svg", grid, results);

  int failures = 0;
  for (const auto& r : results) failures += r.error.empty() ? 0 : 1;
  return failures == 0 ? 0 : 1;
}

std::vector<PaprRow> papr_report(const ExperimentConfig& config) {
  const int n_symbols = config.papr.n_symbols;
  const int n_levels = config.papr.n_levels;
  QuantizerSpec spec = config.base.quantizer;
  spec.n_levels = n_levels;
  const ToneFamily family(n_levels);
  const int cycles = default_carrier_cycles(n_levels);

  auto rng = make_rng(config.papr.seed, {kDataStream});
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> values(static_cast<std::size_t>(n_symbols));
  for (double& v : values) v = gauss(rng);

  const auto len = static_cast<std::size_t>(n_symbols) * static_cast<std::size_t>(n_levels);
  std::vector<double> mfsk;
  std::vector<double> dsb;
  mfsk.reserve(len);
  dsb.reserve(len);
  for (double v : values) {
    const auto tone = mfsk_modulate(quantize(v, spec), family);
    mfsk.insert(mfsk.end(), tone.samples.begin(), tone.samples.end());
    const auto carrier = dsb_modulate(v, n_levels, cycles);
    dsb.insert(dsb.end(), carrier.samples.begin(), carrier.samples.end());
  }

  const double mfsk_papr = papr_db(envelope_power(
      mfsk, {Scheme::Mfsk, n_levels, family.amplitude(), cycles}));
  const double dsb_papr =
      papr_db(envelope_power(dsb, {Scheme::Dsb, n_levels, 1.0, cycles}));
  return {{"mfsk", mfsk_papr, n_symbols, config.papr.seed},
          {"dsb", dsb_papr, n_symbols, config.papr.seed}};
}

int run_papr(const ExperimentConfig& config, std::ostream& out) {
  namespace fs = std::filesystem;
  const fs::path out_dir(config.output_dir);
  fs::create_directories(out_dir);
  const auto rows = papr_report(config);
  std::ofstream csv(out_dir / "papr.csv");
  const std::string header = "scheme,papr_db,n_symbols,seed";
  csv << header << '\n';
  out << header << '\n';
  for (const auto& r : rows) {
    std::ostringstream line;
    line << r.scheme << ',' << format_number(r.papr_db) << ',' << r.n_symbols
         << ',' << r.seed;
    csv << line.str() << '\n';
    out << line.str() << '\n';
  }
  return 0;
}

}  // namespace tbma
