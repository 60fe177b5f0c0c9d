#include "vesselprep/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vesselprep/edt.hpp"
#include "vesselprep/skeleton.hpp"

namespace vesselprep {

namespace {

void require_same_dims(const BinaryMask3& a, const BinaryMask3& b, const char* what) {
    if (!(a.dims == b.dims)) throw std::invalid_argument(std::string(what) + ": dims mismatch");
}

/// Nearest-rank percentile: the smallest value with at least frac of the data
/// at or below it.
double nearest_rank_percentile(std::vector<double>& values, double frac) {
    const std::size_t n = values.size();
    std::size_t rank = static_cast<std::size_t>(std::ceil(frac * static_cast<double>(n)));
    if (rank < 1) rank = 1;
    if (rank > n) rank = n;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                     values.end());
    return values[rank - 1];
}

std::int64_t intersection_count(const std::vector<std::uint8_t>& a,
                                const std::vector<std::uint8_t>& b) {
    std::int64_t n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) n += (a[i] && b[i]) ? 1 : 0;
    return n;
}

}  // namespace

double dice_coefficient(const BinaryMask3& pred, const BinaryMask3& gt) {
    require_same_dims(pred, gt, "dice_coefficient");
    const std::int64_t p = pred.popcount();
    const std::int64_t g = gt.popcount();
    if (p == 0 && g == 0) return 1.0;
    const std::int64_t inter = intersection_count(pred.bits, gt.bits);
    return 2.0 * static_cast<double>(inter) / static_cast<double>(p + g);
}

double cl_dice(const BinaryMask3& pred, const BinaryMask3& gt) {
    require_same_dims(pred, gt, "cl_dice");
    const bool pred_empty = pred.popcount() == 0;
    const bool gt_empty = gt.popcount() == 0;
    if (pred_empty && gt_empty) return 1.0;
    if (pred_empty || gt_empty) return 0.0;

    const BinaryMask3 skel_pred = skeletonize_3d(pred);
    const BinaryMask3 skel_gt = skeletonize_3d(gt);
    const std::int64_t sp = skel_pred.popcount();
    const std::int64_t sg = skel_gt.popcount();
    if (sp == 0 || sg == 0) return 0.0;  // unreachable for nonempty masks, kept as a guard

    const double tprec =
        static_cast<double>(intersection_count(skel_pred.bits, gt.bits)) / static_cast<double>(sp);
    const double tsens =
        static_cast<double>(intersection_count(skel_gt.bits, pred.bits)) / static_cast<double>(sg);
    if (tprec + tsens == 0.0) return 0.0;
    return 2.0 * tprec * tsens / (tprec + tsens);
}

BinaryMask3 surface_voxels(const BinaryMask3& mask) {
    const Dims3 d = mask.dims;
    BinaryMask3 out(d, mask.spacing, false);
    out.orientation = mask.orientation;
    auto bg = [&](std::int64_t x, std::int64_t y, std::int64_t z) {
        if (x < 0 || x >= d.x || y < 0 || y >= d.y || z < 0 || z >= d.z) return true;
        return !mask.get(x, y, z);
    };
    for (std::int64_t z = 0; z < d.z; ++z)
        for (std::int64_t y = 0; y < d.y; ++y)
            for (std::int64_t x = 0; x < d.x; ++x) {
                if (!mask.get(x, y, z)) continue;
                const bool surf = bg(x - 1, y, z) || bg(x + 1, y, z) || bg(x, y - 1, z) ||
                                  bg(x, y + 1, z) || bg(x, y, z - 1) || bg(x, y, z + 1);
                if (surf) out.set(x, y, z, true);
            }
    return out;
}

SurfaceDistanceSet surface_distances(const BinaryMask3& pred, const BinaryMask3& gt,
                                     const Spacing3& spacing, int threads) {
    require_same_dims(pred, gt, "surface_distances");

    BinaryMask3 surf_pred = surface_voxels(pred);
    BinaryMask3 surf_gt = surface_voxels(gt);
    surf_pred.spacing = spacing;
    surf_gt.spacing = spacing;

    const std::vector<double> dist_to_gt = edt_squared(surf_gt, threads);
    const std::vector<double> dist_to_pred = edt_squared(surf_pred, threads);

    SurfaceDistanceSet out;
    for (std::size_t i = 0; i < surf_pred.bits.size(); ++i)
        if (surf_pred.bits[i]) out.d_pred_to_gt.push_back(std::sqrt(dist_to_gt[i]));
    for (std::size_t i = 0; i < surf_gt.bits.size(); ++i)
        if (surf_gt.bits[i]) out.d_gt_to_pred.push_back(std::sqrt(dist_to_pred[i]));
    return out;
}

double hd95(const BinaryMask3& pred, const BinaryMask3& gt, const Spacing3& spacing,
            const Hd95Options& options, int threads) {
    require_same_dims(pred, gt, "hd95");
    if (pred.popcount() == 0 || gt.popcount() == 0)
        throw std::invalid_argument("hd95: undefined for an empty mask");

    SurfaceDistanceSet s = surface_distances(pred, gt, spacing, threads);
    if (options.pooled) {
        std::vector<double> pooled = s.d_pred_to_gt;
        pooled.insert(pooled.end(), s.d_gt_to_pred.begin(), s.d_gt_to_pred.end());
        return nearest_rank_percentile(pooled, 0.95);
    }
    return std::max(nearest_rank_percentile(s.d_pred_to_gt, 0.95),
                    nearest_rank_percentile(s.d_gt_to_pred, 0.95));
}

MetricsReport evaluate_pair(const BinaryMask3& pred, const BinaryMask3& gt, const Spacing3& spacing,
                            const Hd95Options& options, int threads) {
    MetricsReport r;
    r.dice = dice_coefficient(pred, gt);
    r.cldice = cl_dice(pred, gt);
    r.hd95 = hd95(pred, gt, spacing, options, threads);
    return r;
}

}  // namespace vesselprep
