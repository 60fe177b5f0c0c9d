#include "vesselprep/convolve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vesselprep/parallel.hpp"

namespace vesselprep {

Kernel1D gaussian_kernel(double sigma, double trunc) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_kernel: sigma must be positive");
    const int radius = std::max(1, static_cast<int>(std::ceil(trunc * sigma)));
    Kernel1D k;
    k.radius = radius;
    k.taps.resize(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double v = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
        k.taps[static_cast<std::size_t>(i + radius)] = v;
        sum += v;
    }
    for (auto& t : k.taps) t /= sum;
    return k;
}

Kernel1D gaussian_d1_kernel(double sigma, double trunc) {
    const Kernel1D g = gaussian_kernel(sigma, trunc);
    Kernel1D k;
    k.radius = g.radius + 1;
    k.taps.assign(static_cast<std::size_t>(2 * k.radius + 1), 0.0);
    auto g_at = [&](int i) {
        return std::abs(i) <= g.radius ? g.taps[static_cast<std::size_t>(i + g.radius)] : 0.0;
    };
    for (int i = -k.radius; i <= k.radius; ++i)
        k.taps[static_cast<std::size_t>(i + k.radius)] = (g_at(i - 1) - g_at(i + 1)) / 2.0;
    return k;
}

Kernel1D gaussian_d2_kernel(double sigma, double trunc) {
    const Kernel1D g = gaussian_kernel(sigma, trunc);
    Kernel1D k;
    k.radius = g.radius + 1;
    k.taps.assign(static_cast<std::size_t>(2 * k.radius + 1), 0.0);
    auto g_at = [&](int i) {
        return std::abs(i) <= g.radius ? g.taps[static_cast<std::size_t>(i + g.radius)] : 0.0;
    };
    for (int i = -k.radius; i <= k.radius; ++i)
        k.taps[static_cast<std::size_t>(i + k.radius)] = g_at(i - 1) - 2.0 * g_at(i) + g_at(i + 1);
    return k;
}

namespace {

// One line along the chosen axis: out[i] = sum_k taps[k] * in[clamp(i+k)].
// The interior is split off so the hot loop has no clamping.
void correlate_line(const float* in, float* out, std::int64_t n, std::int64_t stride,
                    const Kernel1D& kernel) {
    const int r = kernel.radius;
    const double* taps = kernel.taps.data();

    auto sample = [&](std::int64_t i) { return in[std::clamp<std::int64_t>(i, 0, n - 1) * stride]; };

    const std::int64_t lo = std::min<std::int64_t>(r, n);
    const std::int64_t hi = std::max<std::int64_t>(lo, n - r);

    for (std::int64_t i = 0; i < lo; ++i) {
        double acc = 0.0;
        for (int k = -r; k <= r; ++k) acc += taps[k + r] * sample(i + k);
        out[i * stride] = static_cast<float>(acc);
    }
    for (std::int64_t i = lo; i < hi; ++i) {
        double acc = 0.0;
        const float* p = in + (i - r) * stride;
        for (int k = 0; k <= 2 * r; ++k) acc += taps[k] * p[k * stride];
        out[i * stride] = static_cast<float>(acc);
    }
    for (std::int64_t i = hi; i < n; ++i) {
        double acc = 0.0;
        for (int k = -r; k <= r; ++k) acc += taps[k + r] * sample(i + k);
        out[i * stride] = static_cast<float>(acc);
    }
}

}  // namespace

void correlate_axis(const std::vector<float>& in, std::vector<float>& out, const Dims3& dims,
                    int axis, const Kernel1D& kernel, int threads) {
    if (axis < 0 || axis > 2) throw std::invalid_argument("correlate_axis: axis must be 0, 1 or 2");
    const std::int64_t extent = axis == 0 ? dims.x : axis == 1 ? dims.y : dims.z;
    if (kernel.length() > extent)
        throw std::invalid_argument(
            "correlate_axis: kernel is longer than the volume axis; use a smaller sigma or pad the volume");
    if (static_cast<std::int64_t>(in.size()) != dims.count())
        throw std::invalid_argument("correlate_axis: data size mismatch");
    out.resize(in.size());

    // Lines along `axis`, enumerated over the two remaining axes.
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
        for (std::int64_t l = l0; l < l1; ++l) {
            const std::int64_t a = l % a_extent;
            const std::int64_t b = l / a_extent;
            const std::int64_t base = a * a_stride + b * b_stride;
            correlate_line(in.data() + base, out.data() + base, extent, stride, kernel);
        }
    });
}

}  // namespace vesselprep
