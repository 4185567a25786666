#include "tbma/dct.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <string>

#include "tbma/errors.hpp"

namespace tbma {

namespace {

// The FFTW planner is not thread-safe; execution with a fixed plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class Dct3Plan {
 public:
  explicit Dct3Plan(int n) : n_(n) {
    in_ = fftw_alloc_real(static_cast<std::size_t>(n));
    out_ = fftw_alloc_real(static_cast<std::size_t>(n));
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_r2r_1d(n, in_, out_, FFTW_REDFT01, FFTW_ESTIMATE);
  }
  Dct3Plan(const Dct3Plan&) = delete;
  Dct3Plan& operator=(const Dct3Plan&) = delete;
  ~Dct3Plan() {
    {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(in_);
    fftw_free(out_);
  }

  void run(std::span<const double> in, std::span<double> out) {
    std::copy(in.begin(), in.end(), in_);
    fftw_execute(plan_);
    for (int m = 0; m < n_; ++m) out[m] = 0.5 * out_[m];
  }

 private:
  int n_;
  double* in_;
  double* out_;
  fftw_plan plan_;
};

}  // namespace

void dct3_half(std::span<const double> in, std::span<double> out) {
  if (in.size() != out.size() || in.empty()) {
    throw ShapeError("dct3_half: input length " + std::to_string(in.size()) +
                     " != output length " + std::to_string(out.size()));
  }
  thread_local std::map<std::size_t, Dct3Plan> plans;
  auto it = plans.find(in.size());
  if (it == plans.end()) {
    it = plans.try_emplace(in.size(), static_cast<int>(in.size())).first;
  }
  it->second.run(in, out);
}

}  // namespace tbma
