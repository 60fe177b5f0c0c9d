#include "vesselprep/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vesselprep {

namespace {

constexpr double kDiceSmooth = 1e-5;
constexpr double kBceClamp = 1e-7;

void require_same_dims(const Dims3& a, const Dims3& b, const char* what) {
    if (!(a == b)) throw std::invalid_argument(std::string(what) + ": dims mismatch");
}

}  // namespace

void LossWeights::validate() const {
    for (double g : {gamma1, gamma2, gamma3})
        if (!(g >= 0.0) || !std::isfinite(g))
            throw std::invalid_argument("LossWeights: weights must be finite and >= 0");
}

double l1_regression_loss(const Volume3& pred, const Volume3& target) {
    require_same_dims(pred.dims, target.dims, "l1_regression_loss");
    const std::size_t n = pred.data.size();
    if (n == 0) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        sum += std::abs(static_cast<double>(pred.data[i]) - static_cast<double>(target.data[i]));
    return sum / static_cast<double>(n);
}

DiceBceResult dice_bce_loss(const Volume3& pred_prob, const BinaryMask3& target) {
    require_same_dims(pred_prob.dims, target.dims, "dice_bce_loss");
    const std::size_t n = pred_prob.data.size();
    if (n == 0) throw std::invalid_argument("dice_bce_loss: empty volume");

    double inter = 0.0, sum_p = 0.0, sum_t = 0.0, bce = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double p = pred_prob.data[i];
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("dice_bce_loss: prediction outside [0, 1]");
        const double t = target.bits[i] ? 1.0 : 0.0;
        inter += p * t;
        sum_p += p;
        sum_t += t;
        const double pc = std::clamp(p, kBceClamp, 1.0 - kBceClamp);
        bce -= t * std::log(pc) + (1.0 - t) * std::log(1.0 - pc);
    }

    DiceBceResult r;
    r.dice_part = 1.0 - (2.0 * inter + kDiceSmooth) / (sum_p + sum_t + kDiceSmooth);
    r.bce_part = bce / static_cast<double>(n);
    r.seg = r.dice_part + r.bce_part;
    return r;
}

double mip_consistency_loss(const Volume3& pred_seg, const Volume3& pred_vei, const Volume3& input) {
    require_same_dims(pred_seg.dims, pred_vei.dims, "mip_consistency_loss");
    require_same_dims(pred_seg.dims, input.dims, "mip_consistency_loss");
    const Dims3 d = pred_seg.dims;
    const std::int64_t npix = d.x * d.y;
    if (npix == 0 || d.z == 0) return 0.0;

    double sum = 0.0;
    for (std::int64_t y = 0; y < d.y; ++y)
        for (std::int64_t x = 0; x < d.x; ++x) {
            double mip_vs = -std::numeric_limits<double>::infinity();
            double mip_is = -std::numeric_limits<double>::infinity();
            for (std::int64_t z = 0; z < d.z; ++z) {
                const std::size_t i = static_cast<std::size_t>(voxel_index(d, x, y, z));
                const double s = pred_seg.data[i];
                mip_vs = std::max(mip_vs, s * static_cast<double>(pred_vei.data[i]));
                mip_is = std::max(mip_is, s * static_cast<double>(input.data[i]));
            }
            sum += std::abs(mip_vs - mip_is);
        }
    return sum / static_cast<double>(npix);
}

double total_loss(double rgn, double seg, double consistency, const LossWeights& w) {
    w.validate();
    if (!std::isfinite(rgn) || !std::isfinite(seg) || !std::isfinite(consistency))
        throw std::invalid_argument("total_loss: non-finite loss term");
    return w.gamma1 * rgn + w.gamma2 * seg + w.gamma3 * consistency;
}

LossReport compute_losses(const Volume3& pred_vei, const Volume3& target_vei,
                          const Volume3& pred_seg, const BinaryMask3& target_seg,
                          const Volume3& input, const LossWeights& w) {
    LossReport rep;
    rep.weights = w;
    rep.rgn = l1_regression_loss(pred_vei, target_vei);
    const DiceBceResult db = dice_bce_loss(pred_seg, target_seg);
    rep.seg = db.seg;
    rep.dice_part = db.dice_part;
    rep.bce_part = db.bce_part;
    rep.consistency = mip_consistency_loss(pred_seg, pred_vei, input);
    rep.total = total_loss(rep.rgn, rep.seg, rep.consistency, w);
    return rep;
}

}  // namespace vesselprep
