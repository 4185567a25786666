#pragma once

#include <span>

namespace tbma {

// out[m] = 0.5 * in[0] + sum_{n >= 1} in[n] * cos(pi * (2m + 1) * n / (2N))
// for m = 0..N-1, i.e. half of FFTW's REDFT01 (DCT-III). O(N log N).
// Plans are created once per (thread, N) with FFTW_ESTIMATE, so the output
// is bit-reproducible from run to run.
void dct3_half(std::span<const double> in, std::span<double> out);

}  // namespace tbma
