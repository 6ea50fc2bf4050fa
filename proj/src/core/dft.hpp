#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace kloostpath {

// Unnormalized inverse DFT: out[k] = sum_x in[x] * e(+2*pi*i*k*x/N).
// Backed by FFTW; the planner is serialized internally.
void inverse_dft(std::vector<std::complex<double>>& data);

} // namespace kloostpath
