#pragma once

#include "grid.hpp"

#include <vector>

namespace tracelab {

/// In-place unnormalized DFT over `dims` (row-major), `howmany` interleaved
/// transforms with element stride `stride` and batch distance `dist`.
/// sign = -1 forward, +1 backward. Plans are cached and shared across threads.
void dft_inplace(std::vector<cplx>& data, const std::vector<int>& dims, int howmany, int stride, int dist, int sign);

/// Grid values -> Fourier coefficients c_k (f(x) = sum c_k e^{i xi_k x}).
Spectrum to_coeffs(const GridFunction& f);
/// Inverse of to_coeffs.
GridFunction from_coeffs(const Spectrum& s, double gamma = 0.0);

/// Transform along axis 0 only. Result layout: slot [k0][tangential node][c].
std::vector<cplx> axis0_coeffs(const GridFunction& f);

}  // namespace tracelab
