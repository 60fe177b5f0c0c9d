#pragma once

#include <vector>

#include "vesselprep/volume.hpp"

namespace vesselprep {

/// Exact squared Euclidean distance transform with anisotropic spacing, via
/// the separable lower-envelope (parabola) algorithm, one pass per axis.
/// On input, f holds 0 at source voxels and +infinity elsewhere; on output,
/// f[i] is the squared distance in mm^2 from voxel center i to the nearest
/// source voxel center. Voxels stay at +infinity when there is no source.
void edt_squared_inplace(std::vector<double>& f, const Dims3& dims, const Spacing3& spacing,
                         int threads = 0);

/// Convenience wrapper: squared EDT seeded by the true voxels of a mask.
std::vector<double> edt_squared(const BinaryMask3& sources, int threads = 0);

}  // namespace vesselprep
