#pragma once

#include <vector>

#include "vesselprep/volume.hpp"

namespace vesselprep {

/// Scalar bundle of the three evaluation metrics for one (pred, gt) pair.
struct MetricsReport {
    double dice = 0.0;
    double cldice = 0.0;
    double hd95 = 0.0;   // millimeters (or voxel units when spacing is 1)
};

/// Directed surface distances in mm, one entry per surface voxel of each mask.
struct SurfaceDistanceSet {
    std::vector<double> d_pred_to_gt;
    std::vector<double> d_gt_to_pred;
};

struct Hd95Options {
    bool pooled = false;   // pool both directed sets before the percentile
};

/// 2|P∩G| / (|P|+|G|); both masks empty yields 1 by convention.
double dice_coefficient(const BinaryMask3& pred, const BinaryMask3& gt);

/// Centerline Dice: harmonic mean of topology precision |skel(pred)∩gt| /
/// |skel(pred)| and sensitivity |skel(gt)∩pred| / |skel(gt)|. Conventions:
/// both masks empty -> 1, exactly one empty -> 0.
double cl_dice(const BinaryMask3& pred, const BinaryMask3& gt);

/// Foreground voxels with at least one 6-neighbor background voxel; the
/// volume boundary counts as background.
BinaryMask3 surface_voxels(const BinaryMask3& mask);

/// Exact anisotropic surface-to-surface distances (voxel centers, mm).
SurfaceDistanceSet surface_distances(const BinaryMask3& pred, const BinaryMask3& gt,
                                     const Spacing3& spacing, int threads = 0);

/// 95th-percentile Hausdorff distance in mm: max of the two directed
/// nearest-rank 95th percentiles (or the pooled percentile). Throws
/// std::invalid_argument when either mask is empty.
double hd95(const BinaryMask3& pred, const BinaryMask3& gt, const Spacing3& spacing,
            const Hd95Options& options = {}, int threads = 0);

/// All three metrics for one pair, using the given spacing for hd95.
MetricsReport evaluate_pair(const BinaryMask3& pred, const BinaryMask3& gt, const Spacing3& spacing,
                            const Hd95Options& options = {}, int threads = 0);

}  // namespace vesselprep
