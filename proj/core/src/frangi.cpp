#include "vesselprep/frangi.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include "vesselprep/convolve.hpp"
#include "vesselprep/eigen3.hpp"
#include "vesselprep/parallel.hpp"

namespace vesselprep {

void FrangiParams::validate() const {
    if (scales.empty()) throw std::invalid_argument("FrangiParams: scale set is empty");
    double prev = 0.0;
    for (double s : scales) {
        if (!(s > prev)) throw std::invalid_argument("FrangiParams: scales must be positive and strictly ascending");
        prev = s;
    }
    if (!(alpha > 0.0) || !(beta > 0.0)) throw std::invalid_argument("FrangiParams: alpha and beta must be positive");
    if (c && !(*c > 0.0)) throw std::invalid_argument("FrangiParams: explicit c must be positive");
    if (!(gamma_norm >= 0.0)) throw std::invalid_argument("FrangiParams: gamma_norm must be >= 0");
    if (!(truncation > 0.0)) throw std::invalid_argument("FrangiParams: truncation must be positive");
}

HessianField gaussian_hessian(const Volume3& vol, double sigma, const FrangiParams& params,
                              int threads) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_hessian: sigma must be positive");

    const float min_sp = std::min({vol.spacing.sx, vol.spacing.sy, vol.spacing.sz});
    const double sig[3] = {sigma * min_sp / vol.spacing.sx, sigma * min_sp / vol.spacing.sy,
                           sigma * min_sp / vol.spacing.sz};

    Kernel1D smooth[3], d1[3], d2[3];
    for (int a = 0; a < 3; ++a) {
        smooth[a] = gaussian_kernel(sig[a], params.truncation);
        d1[a] = gaussian_d1_kernel(sig[a], params.truncation);
        d2[a] = gaussian_d2_kernel(sig[a], params.truncation);
    }

    HessianField h;
    h.dims = vol.dims;

    std::vector<float> tmp;
    auto component = [&](const Kernel1D& kx, const Kernel1D& ky, const Kernel1D& kz,
                         std::vector<float>& out) {
        correlate_axis(vol.data, out, vol.dims, 0, kx, threads);
        correlate_axis(out, tmp, vol.dims, 1, ky, threads);
        correlate_axis(tmp, out, vol.dims, 2, kz, threads);
    };
    component(d2[0], smooth[1], smooth[2], h.ixx);
    component(smooth[0], d2[1], smooth[2], h.iyy);
    component(smooth[0], smooth[1], d2[2], h.izz);
    component(d1[0], d1[1], smooth[2], h.ixy);
    component(d1[0], smooth[1], d1[2], h.ixz);
    component(smooth[0], d1[1], d1[2], h.iyz);

    const float norm = static_cast<float>(std::pow(sigma, params.gamma_norm));
    if (norm != 1.0f) {
        const std::int64_t n = vol.dims.count();
        for (auto* f : {&h.ixx, &h.iyy, &h.izz, &h.ixy, &h.ixz, &h.iyz}) {
            parallel_chunks(0, n, threads, [&](std::int64_t i0, std::int64_t i1) {
                float* p = f->data();
                for (std::int64_t i = i0; i < i1; ++i) p[i] *= norm;
            });
        }
    }
    return h;
}

namespace {

// Max is exact under any reduction order, so the chunked reduction stays
// bit-identical across thread counts.
double max_frobenius_norm(const HessianField& h, int threads) {
    std::mutex mu;
    double m = 0.0;
    parallel_chunks(0, h.dims.count(), threads, [&](std::int64_t i0, std::int64_t i1) {
        double local = 0.0;
        for (std::int64_t i = i0; i < i1; ++i) {
            const double xx = h.ixx[i], yy = h.iyy[i], zz = h.izz[i];
            const double xy = h.ixy[i], xz = h.ixz[i], yz = h.iyz[i];
            local = std::max(local, xx * xx + yy * yy + zz * zz + 2.0 * (xy * xy + xz * xz + yz * yz));
        }
        std::lock_guard<std::mutex> lock(mu);
        m = std::max(m, local);
    });
    return std::sqrt(m);
}

}  // namespace

Volume3 vesselness_at_scale(const HessianField& h, const FrangiParams& params,
                            const Spacing3& spacing, int threads) {
    params.validate();
    Volume3 out(h.dims, spacing, 0.0f);

    double c = params.c.value_or(0.5 * max_frobenius_norm(h, threads));
    if (!(c > 0.0)) return out;  // flat field: no structure anywhere

    const bool bright = params.polarity == Polarity::BrightOnDark;
    const double inv_2a2 = 1.0 / (2.0 * params.alpha * params.alpha);
    const double inv_2b2 = 1.0 / (2.0 * params.beta * params.beta);
    const double inv_2c2 = 1.0 / (2.0 * c * c);

    parallel_chunks(0, h.dims.count(), threads, [&](std::int64_t i0, std::int64_t i1) {
        for (std::int64_t i = i0; i < i1; ++i) {
            const EigenTriple e =
                eigen3_symmetric(h.ixx[i], h.iyy[i], h.izz[i], h.ixy[i], h.ixz[i], h.iyz[i]);
            if (bright ? (e.lam2 > 0.0 || e.lam3 > 0.0) : (e.lam2 < 0.0 || e.lam3 < 0.0)) continue;
            const double a3 = std::abs(e.lam3);
            if (a3 == 0.0) continue;
            const double a1 = std::abs(e.lam1), a2 = std::abs(e.lam2);
            const double ra = a2 / a3;
            const double rb2_den = a2 * a3;
            // |l1| <= |l2|, so a zero denominator implies a zero numerator.
            const double rb2 = rb2_den > 0.0 ? (a1 * a1) / rb2_den : 0.0;
            const double s2 = a1 * a1 + a2 * a2 + a3 * a3;
            const double v = (1.0 - std::exp(-(ra * ra) * inv_2a2)) * std::exp(-rb2 * inv_2b2) *
                             (1.0 - std::exp(-s2 * inv_2c2));
            out.data[i] = static_cast<float>(v);
        }
    });
    return out;
}

MultiscaleResult frangi_multiscale_detailed(const Volume3& vol, const FrangiParams& params,
                                            int threads) {
    params.validate();
    MultiscaleResult res;
    res.vei = Volume3(vol.dims, vol.spacing, 0.0f);
    res.vei.orientation = vol.orientation;
    res.argmax.assign(static_cast<std::size_t>(vol.dims.count()), 0);

    for (std::size_t si = 0; si < params.scales.size(); ++si) {
        const HessianField h = gaussian_hessian(vol, params.scales[si], params, threads);
        const Volume3 v = vesselness_at_scale(h, params, vol.spacing, threads);
        parallel_chunks(0, vol.dims.count(), threads, [&](std::int64_t i0, std::int64_t i1) {
            for (std::int64_t i = i0; i < i1; ++i) {
                if (v.data[i] > res.vei.data[i]) {
                    res.vei.data[i] = v.data[i];
                    res.argmax[i] = static_cast<std::uint8_t>(si);
                }
            }
        });
    }
    return res;
}

Volume3 frangi_multiscale(const Volume3& vol, const FrangiParams& params, int threads) {
    return frangi_multiscale_detailed(vol, params, threads).vei;
}

}  // namespace vesselprep
