#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vesselprep {

/// Eigenvalues of a symmetric 3x3 matrix, ordered |lam1| <= |lam2| <= |lam3|.
struct EigenTriple {
    double lam1 = 0.0;
    double lam2 = 0.0;
    double lam3 = 0.0;
};

namespace detail {

inline EigenTriple sort_by_abs(double a, double b, double c) {
    if (std::abs(a) > std::abs(b)) std::swap(a, b);
    if (std::abs(b) > std::abs(c)) std::swap(b, c);
    if (std::abs(a) > std::abs(b)) std::swap(a, b);
    return {a, b, c};
}

}  // namespace detail

/// Closed-form (trigonometric) eigenvalues of the symmetric matrix
///   [ ixx ixy ixz ]
///   [ ixy iyy iyz ]
///   [ ixz iyz izz ].
/// Allocation-free; per-voxel use in the vesselness filter. When the
/// off-diagonal norm is negligible against the matrix norm the diagonal is
/// returned directly.
inline EigenTriple eigen3_symmetric(double ixx, double iyy, double izz, double ixy, double ixz,
                                    double iyz) {
    if (!std::isfinite(ixx) || !std::isfinite(iyy) || !std::isfinite(izz) || !std::isfinite(ixy) ||
        !std::isfinite(ixz) || !std::isfinite(iyz))
        throw std::invalid_argument("eigen3_symmetric: non-finite input");

    const double off2 = ixy * ixy + ixz * ixz + iyz * iyz;
    const double frob2 = ixx * ixx + iyy * iyy + izz * izz + 2.0 * off2;
    if (off2 <= 1e-24 * frob2) return detail::sort_by_abs(ixx, iyy, izz);

    const double q = (ixx + iyy + izz) / 3.0;
    const double p2 =
        (ixx - q) * (ixx - q) + (iyy - q) * (iyy - q) + (izz - q) * (izz - q) + 2.0 * off2;
    const double p = std::sqrt(p2 / 6.0);

    // det(B) / 2 with B = (A - qI) / p.
    const double b11 = (ixx - q) / p, b22 = (iyy - q) / p, b33 = (izz - q) / p;
    const double b12 = ixy / p, b13 = ixz / p, b23 = iyz / p;
    double r = (b11 * (b22 * b33 - b23 * b23) - b12 * (b12 * b33 - b23 * b13) +
                b13 * (b12 * b23 - b22 * b13)) /
               2.0;
    r = std::clamp(r, -1.0, 1.0);

    const double phi = std::acos(r) / 3.0;
    const double two_p = 2.0 * p;
    const double e1 = q + two_p * std::cos(phi);
    const double e3 = q + two_p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
    const double e2 = 3.0 * q - e1 - e3;
    return detail::sort_by_abs(e1, e2, e3);
}

}  // namespace vesselprep
