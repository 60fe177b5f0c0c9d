#include "vesselprep/edt.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "vesselprep/parallel.hpp"

namespace vesselprep {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1D lower envelope of parabolas y(x) = (x - q*h)^2 + f[q], sampled at the
// grid positions. Infinite-height parabolas (no source yet) are skipped.
void dt1d(double* f, std::int64_t n, std::int64_t stride, double h, std::int64_t* v, double* z,
          double* scratch) {
    int k = -1;
    for (std::int64_t q = 0; q < n; ++q) {
        const double fq = f[q * stride];
        if (fq == kInf) continue;
        const double xq = static_cast<double>(q) * h;
        while (k >= 0) {
            const double xv = static_cast<double>(v[k]) * h;
            const double fv = f[v[k] * stride];
            const double s = ((fq + xq * xq) - (fv + xv * xv)) / (2.0 * (xq - xv));
            if (s <= z[k]) {
                --k;
            } else {
                ++k;
                v[k] = q;
                z[k] = s;
                z[k + 1] = kInf;
                break;
            }
        }
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -kInf;
            z[1] = kInf;
        }
    }
    if (k < 0) return;  // entire line has no source

    int j = 0;
    for (std::int64_t q = 0; q < n; ++q) {
        const double xq = static_cast<double>(q) * h;
        while (z[j + 1] < xq) ++j;
        const double xv = static_cast<double>(v[j]) * h;
        scratch[q] = (xq - xv) * (xq - xv) + f[v[j] * stride];
    }
    for (std::int64_t q = 0; q < n; ++q) f[q * stride] = scratch[q];
}

}  // namespace

void edt_squared_inplace(std::vector<double>& f, const Dims3& dims, const Spacing3& spacing,
                         int threads) {
    if (static_cast<std::int64_t>(f.size()) != dims.count())
        throw std::invalid_argument("edt_squared_inplace: size mismatch");
    if (!(spacing.sx > 0 && spacing.sy > 0 && spacing.sz > 0))
        throw std::invalid_argument("edt_squared_inplace: spacing must be positive");

    const double h[3] = {spacing.sx, spacing.sy, spacing.sz};
    for (int axis = 0; axis < 3; ++axis) {
        const std::int64_t extent = axis == 0 ? dims.x : axis == 1 ? dims.y : dims.z;
        if (extent == 0) return;
        const std::int64_t stride = axis == 0 ? 1 : axis == 1 ? dims.x : dims.x * dims.y;

        std::int64_t n_lines, a_extent, a_stride, b_stride;
        if (axis == 0) {
            n_lines = dims.y * dims.z;
            a_extent = dims.y;
            a_stride = dims.x;
            b_stride = dims.x * dims.y;
        } else if (axis == 1) {
            n_lines = dims.x * dims.z;
            a_extent = dims.x;
            a_stride = 1;
            b_stride = dims.x * dims.y;
        } else {
            n_lines = dims.x * dims.y;
            a_extent = dims.x;
            a_stride = 1;
            b_stride = dims.x;
        }

        parallel_chunks(0, n_lines, threads, [&](std::int64_t l0, std::int64_t l1) {
            std::vector<std::int64_t> v(static_cast<std::size_t>(extent));
            std::vector<double> z(static_cast<std::size_t>(extent) + 1);
            std::vector<double> scratch(static_cast<std::size_t>(extent));
            for (std::int64_t l = l0; l < l1; ++l) {
                const std::int64_t a = l % a_extent;
                const std::int64_t b = l / a_extent;
                dt1d(f.data() + a * a_stride + b * b_stride, extent, stride, h[axis], v.data(),
                     z.data(), scratch.data());
            }
        });
    }
}

std::vector<double> edt_squared(const BinaryMask3& sources, int threads) {
    std::vector<double> f(sources.bits.size(), kInf);
    for (std::size_t i = 0; i < sources.bits.size(); ++i)
        if (sources.bits[i]) f[i] = 0.0;
    edt_squared_inplace(f, sources.dims, sources.spacing, threads);
    return f;
}

}  // namespace vesselprep
