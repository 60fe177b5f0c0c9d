#pragma once

#include "vesselprep/volume.hpp"

namespace vesselprep {

struct LossWeights {
    double gamma1 = 0.4;   // regression
    double gamma2 = 0.4;   // segmentation (dice + bce)
    double gamma3 = 0.2;   // MIP consistency

    void validate() const;
};

/// Per-term loss values plus their weighted total.
struct LossReport {
    double rgn = 0.0;
    double seg = 0.0;         // dice_part + bce_part
    double dice_part = 0.0;
    double bce_part = 0.0;
    double consistency = 0.0;
    double total = 0.0;
    LossWeights weights;
};

/// Mean absolute difference over voxels.
double l1_regression_loss(const Volume3& pred, const Volume3& target);

struct DiceBceResult {
    double seg = 0.0;
    double dice_part = 0.0;
    double bce_part = 0.0;
};

/// Smoothed Dice loss plus binary cross entropy.
///   dice_part = 1 - (2*sum(p*t) + eps) / (sum(p) + sum(t) + eps), eps = 1e-5
///   bce_part  = mean of -[t*ln(p) + (1-t)*ln(1-p)], p clamped to
///               [1e-7, 1 - 1e-7]
/// Predictions must lie in [0, 1].
DiceBceResult dice_bce_loss(const Volume3& pred_prob, const BinaryMask3& target);

/// Mean absolute difference between the two Z-axis maximum projections
/// MIP(pred_seg * pred_vei) and MIP(pred_seg * input).
double mip_consistency_loss(const Volume3& pred_seg, const Volume3& pred_vei, const Volume3& input);

/// gamma1*rgn + gamma2*seg + gamma3*consistency.
double total_loss(double rgn, double seg, double consistency, const LossWeights& w);

/// Evaluates all terms on one (prediction, target) bundle.
LossReport compute_losses(const Volume3& pred_vei, const Volume3& target_vei,
                          const Volume3& pred_seg, const BinaryMask3& target_seg,
                          const Volume3& input, const LossWeights& w);

}  // namespace vesselprep
