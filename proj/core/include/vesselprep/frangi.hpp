#pragma once

#include <optional>
#include <vector>

#include "vesselprep/volume.hpp"

namespace vesselprep {

enum class Polarity { BrightOnDark, DarkOnBright };

struct FrangiParams {
    std::vector<double> scales = {0.5, 1.0, 2.0, 4.0};  // sigmas, voxel units, ascending
    double alpha = 0.5;                 // plate/line discriminator
    double beta = 0.5;                  // blob discriminator
    std::optional<double> c;            // structureness constant; auto when unset
    Polarity polarity = Polarity::BrightOnDark;
    double gamma_norm = 2.0;            // second derivatives scaled by sigma^gamma_norm
    double truncation = 4.0;            // kernel half-width = ceil(truncation * sigma)

    void validate() const;
};

/// Six per-voxel second-derivative fields of a volume at one scale.
struct HessianField {
    Dims3 dims;
    std::vector<float> ixx, iyy, izz, ixy, ixz, iyz;
};

/// Scale-space Hessian via separable Gaussian-derivative correlation, fixed
/// pass order x, y, z, edge-replicate boundary. Components are multiplied by
/// sigma^gamma_norm. Anisotropic spacing shrinks the per-axis sigma:
/// sigma_axis = sigma * min_spacing / spacing_axis.
HessianField gaussian_hessian(const Volume3& vol, double sigma, const FrangiParams& params,
                              int threads = 0);

/// Frangi tubularity response for every voxel of a Hessian field, in [0, 1].
/// With eigenvalues ordered |l1| <= |l2| <= |l3| and bright polarity the
/// response is zero when l2 > 0 or l3 > 0; otherwise
///   V = (1 - exp(-Ra^2 / 2a^2)) * exp(-Rb^2 / 2b^2) * (1 - exp(-S^2 / 2c^2))
/// with Ra = |l2|/|l3|, Rb = |l1|/sqrt(|l2*l3|), S = sqrt(l1^2+l2^2+l3^2).
/// An unset c resolves to half the maximum Frobenius norm of the field.
Volume3 vesselness_at_scale(const HessianField& h, const FrangiParams& params,
                            const Spacing3& spacing = {}, int threads = 0);

struct MultiscaleResult {
    Volume3 vei;                         // voxelwise max response over scales
    std::vector<std::uint8_t> argmax;    // index into params.scales per voxel
};

/// Voxelwise maximum of vesselness over all configured scales (the VEI).
Volume3 frangi_multiscale(const Volume3& vol, const FrangiParams& params, int threads = 0);

/// Same, additionally reporting which scale won per voxel.
MultiscaleResult frangi_multiscale_detailed(const Volume3& vol, const FrangiParams& params,
                                            int threads = 0);

}  // namespace vesselprep
