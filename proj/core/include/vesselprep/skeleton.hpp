#pragma once

#include "vesselprep/volume.hpp"

namespace vesselprep {

/// Medial-axis thinning of a binary volume. Border voxels are peeled in six
/// fixed direction-ordered subiterations; a voxel is only removed when it is
/// a simple point (deletion preserves 26-connected foreground components and
/// 6-connected background components, checked via the local topological
/// numbers of the 3x3x3 neighborhood) and not a curve endpoint. The result is
/// a subset of the input, deterministic, and a fixpoint of the procedure.
BinaryMask3 skeletonize_3d(const BinaryMask3& mask);

}  // namespace vesselprep
