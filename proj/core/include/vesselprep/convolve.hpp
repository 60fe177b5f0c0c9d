#pragma once

#include <vector>

#include "vesselprep/volume.hpp"

namespace vesselprep {

/// Odd-length 1D kernel; taps[k + radius] is the weight for offset k.
struct Kernel1D {
    std::vector<double> taps;
    int radius = 0;

    int length() const { return 2 * radius + 1; }
};

/// Sampled Gaussian, normalized to sum exactly 1. Radius ceil(trunc * sigma),
/// at least 1.
Kernel1D gaussian_kernel(double sigma, double trunc = 4.0);

/// First-derivative kernel: the central difference of the smoothed signal,
/// folded into one kernel. Correlating with it equals smoothing with
/// gaussian_kernel(sigma) and then taking (s[i+1] - s[i-1]) / 2.
Kernel1D gaussian_d1_kernel(double sigma, double trunc = 4.0);

/// Second-derivative kernel: s[i+1] - 2 s[i] + s[i-1] of the smoothed signal.
Kernel1D gaussian_d2_kernel(double sigma, double trunc = 4.0);

/// Correlates one axis (0=x, 1=y, 2=z) with a 1D kernel, edge-replicate
/// boundary. Lines are processed independently with fixed-order accumulation,
/// so the output is bit-identical for any thread count. Throws
/// std::invalid_argument when the kernel is longer than the axis extent.
void correlate_axis(const std::vector<float>& in, std::vector<float>& out, const Dims3& dims,
                    int axis, const Kernel1D& kernel, int threads = 0);

}  // namespace vesselprep
