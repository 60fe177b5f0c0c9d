#pragma once

#include <vector>

#include "vesselprep/volume.hpp"

namespace vesselprep {

struct CoarseSegParams {
    double top_percent = 0.05;   // fraction of brightest voxels thresholded into the vessel mask
    int k = 4;                   // number of largest components kept (sensible range 3-5)
    int connectivity = 26;       // 6, 18 or 26
    bool only_nonzero = false;   // compute the percentile over nonzero voxels only

    void validate() const;
};

/// Dense component labeling. Label 0 is background; labels 1..K are ordered
/// by descending voxel count, ties broken by the smaller first-voxel linear
/// index. `sizes[i]` is the voxel count of label i+1.
struct LabeledComponents {
    Dims3 dims;
    std::vector<std::int32_t> labels;
    std::vector<std::int64_t> sizes;

    std::size_t count() const { return sizes.size(); }
};

/// 3D variant of the nearest-rank percentile threshold: keeps voxels whose
/// value is >= the value at 0-based position ceil((1-p)*N) of the
/// ascending-sorted voxels (ties included). With only_nonzero the rank is
/// computed over nonzero voxels and zeros are never kept.
BinaryMask3 threshold_top_percent_3d(const Volume3& vei, double p, bool only_nonzero = false);

/// Union-find labeling under 6/18/26-connectivity. The result depends only
/// on the mask, not on scan order.
LabeledComponents connected_components_3d(const BinaryMask3& mask, int connectivity);

/// Union of the k largest components (all of them when fewer than k exist).
BinaryMask3 keep_largest_k(const LabeledComponents& comps, int k, const Spacing3& spacing = {});

/// threshold -> label -> keep-largest-k composition producing the coarse
/// vessel segmentation.
BinaryMask3 coarse_segmentation(const Volume3& vei, const CoarseSegParams& params);

}  // namespace vesselprep
