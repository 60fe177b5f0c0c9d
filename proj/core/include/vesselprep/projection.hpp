#pragma once

#include <optional>

#include "vesselprep/volume.hpp"

namespace vesselprep {

/// Z-axis projection images of a volume: per pixel (x,y), the mean, maximum
/// and population standard deviation over the slice axis.
struct ProjectionSet {
    Image2 aip;   // average intensity projection
    Image2 mip;   // maximum intensity projection
    Image2 ivm;   // intensity variation map (population std over z)
};

struct CropParams {
    double top_percent = 0.35;      // fraction of brightest pixels kept per projection mask
    std::int64_t min_region_px = 200;
    int region_connectivity = 8;    // 4 or 8
    // Optional per-projection overrides; the shared top_percent applies when unset.
    std::optional<double> top_percent_aip;
    std::optional<double> top_percent_mip;
    std::optional<double> top_percent_ivm;
};

struct CropPipelineResult {
    Volume3 volume;
    CropBox box;
    bool full_extent_fallback = false;   // merged mask was empty after filtering
};

/// Computes the three Z-axis projections in one pass over the volume.
ProjectionSet z_projections(const Volume3& vol, int threads = 0);

/// Mask of pixels with value >= t, where t is the nearest-rank value at
/// position ceil((1-p)*N) (0-based) of the ascending-sorted pixels. Ties at t
/// are all included, so the popcount is at least floor(p*N).
Mask2 top_percent_mask(const Image2& img, double p);

/// Pixelwise conjunction. All masks must share dimensions.
Mask2 merge_masks_and(const std::vector<Mask2>& masks);

/// Clears connected regions (4- or 8-connectivity) with fewer than min_size
/// pixels; regions of exactly min_size survive.
Mask2 remove_small_regions(const Mask2& mask, std::int64_t min_size, int connectivity);

/// Tight bounding rectangle of the true pixels. Throws std::invalid_argument
/// when the mask is empty.
CropBox compute_crop_box(const Mask2& mask);

/// Full cropping chain: projections -> per-projection percentile masks ->
/// AND-merge -> small-region removal -> bounding box -> crop. An empty merged
/// mask falls back to the full extent and flags the result.
CropPipelineResult crop_pipeline(const Volume3& vol, const CropParams& params, int threads = 0);

/// Fraction of voxels removed by a crop: (N - N') / N over the raw voxel
/// counts of the original and cropped dims.
double cropping_rate(const Dims3& orig, const Dims3& cropped);

}  // namespace vesselprep
