#include "support/phantoms.hpp"

#include <algorithm>
#include <cmath>

namespace vesselprep::testing {

Volume3 random_volume(Dims3 dims, Rng& rng, float lo, float hi, Spacing3 spacing) {
    Volume3 v(dims, spacing);
    std::uniform_real_distribution<float> dist(lo, hi);
    for (auto& x : v.data) x = dist(rng);
    return v;
}

BinaryMask3 random_mask(Dims3 dims, Rng& rng, double p_foreground, Spacing3 spacing) {
    BinaryMask3 m(dims, spacing);
    std::bernoulli_distribution dist(p_foreground);
    for (auto& b : m.bits) b = dist(rng) ? 1 : 0;
    return m;
}

Volume3 smooth_random_volume(Dims3 dims, Rng& rng, double smoothing_sigma) {
    Volume3 noise = random_volume(dims, rng, -1.0f, 1.0f);
    Volume3 out(dims, noise.spacing);

    const int r = static_cast<int>(std::ceil(3.0 * smoothing_sigma));
    std::vector<double> kern(static_cast<std::size_t>(2 * r + 1));
    double sum = 0.0;
    for (int i = -r; i <= r; ++i) {
        kern[static_cast<std::size_t>(i + r)] =
            std::exp(-(static_cast<double>(i) * i) / (2.0 * smoothing_sigma * smoothing_sigma));
        sum += kern[static_cast<std::size_t>(i + r)];
    }
    for (auto& k : kern) k /= sum;

    // Three naive separable passes, replicate boundary; slow but independent
    // of the library's convolution code.
    auto pass = [&](const Volume3& in, int axis) {
        Volume3 res(dims, in.spacing);
        for (std::int64_t z = 0; z < dims.z; ++z)
            for (std::int64_t y = 0; y < dims.y; ++y)
                for (std::int64_t x = 0; x < dims.x; ++x) {
                    double acc = 0.0;
                    for (int k = -r; k <= r; ++k) {
                        std::int64_t xx = x, yy = y, zz = z;
                        if (axis == 0) xx = std::clamp<std::int64_t>(x + k, 0, dims.x - 1);
                        if (axis == 1) yy = std::clamp<std::int64_t>(y + k, 0, dims.y - 1);
                        if (axis == 2) zz = std::clamp<std::int64_t>(z + k, 0, dims.z - 1);
                        acc += kern[static_cast<std::size_t>(k + r)] * in.at(xx, yy, zz);
                    }
                    res.at(x, y, z) = static_cast<float>(acc);
                }
        return res;
    };
    out = pass(pass(pass(noise, 0), 1), 2);
    return out;
}

Volume3 cylinder_volume(Dims3 dims, double radius, float inside, float background,
                        Spacing3 spacing) {
    Volume3 v(dims, spacing, background);
    const double cx = (static_cast<double>(dims.x) - 1.0) / 2.0;
    const double cy = (static_cast<double>(dims.y) - 1.0) / 2.0;
    for (std::int64_t z = 0; z < dims.z; ++z)
        for (std::int64_t y = 0; y < dims.y; ++y)
            for (std::int64_t x = 0; x < dims.x; ++x) {
                const double dx = static_cast<double>(x) - cx;
                const double dy = static_cast<double>(y) - cy;
                if (dx * dx + dy * dy <= radius * radius) v.at(x, y, z) = inside;
            }
    return v;
}

BinaryMask3 tube_mask(Dims3 dims, double radius, std::int64_t z0, std::int64_t z1,
                      Spacing3 spacing) {
    BinaryMask3 m(dims, spacing);
    const double cx = (static_cast<double>(dims.x) - 1.0) / 2.0;
    const double cy = (static_cast<double>(dims.y) - 1.0) / 2.0;
    for (std::int64_t z = z0; z < z1; ++z)
        for (std::int64_t y = 0; y < dims.y; ++y)
            for (std::int64_t x = 0; x < dims.x; ++x) {
                const double dx = static_cast<double>(x) - cx;
                const double dy = static_cast<double>(y) - cy;
                if (dx * dx + dy * dy <= radius * radius) m.set(x, y, z, true);
            }
    return m;
}

Volume3 ellipsoid_in_noise(Dims3 dims, double rx, double ry, double rz, float value, Rng& rng,
                           BinaryMask3* ellipsoid_mask) {
    Volume3 v = random_volume(dims, rng, 0.0f, 1.0f);
    if (ellipsoid_mask) *ellipsoid_mask = BinaryMask3(dims, v.spacing);
    const double cx = (static_cast<double>(dims.x) - 1.0) / 2.0;
    const double cy = (static_cast<double>(dims.y) - 1.0) / 2.0;
    const double cz = (static_cast<double>(dims.z) - 1.0) / 2.0;
    for (std::int64_t z = 0; z < dims.z; ++z)
        for (std::int64_t y = 0; y < dims.y; ++y)
            for (std::int64_t x = 0; x < dims.x; ++x) {
                const double ex = (static_cast<double>(x) - cx) / rx;
                const double ey = (static_cast<double>(y) - cy) / ry;
                const double ez = (static_cast<double>(z) - cz) / rz;
                if (ex * ex + ey * ey + ez * ez <= 1.0) {
                    v.at(x, y, z) = value;
                    if (ellipsoid_mask) ellipsoid_mask->set(x, y, z, true);
                }
            }
    return v;
}

Volume3 head_phantom(Dims3 dims, Rng& rng, double tube_radius, BinaryMask3* tube_mask,
                     Spacing3 spacing) {
    Volume3 v = random_volume(dims, rng, 0.0f, 0.2f, spacing);
    if (tube_mask) *tube_mask = BinaryMask3(dims, spacing);

    const double cx = (static_cast<double>(dims.x) - 1.0) / 2.0;
    const double cy = (static_cast<double>(dims.y) - 1.0) / 2.0;
    const double cz = (static_cast<double>(dims.z) - 1.0) / 2.0;
    const double rx = 0.36 * static_cast<double>(dims.x);
    const double ry = 0.36 * static_cast<double>(dims.y);
    const double rz = 0.46 * static_cast<double>(dims.z);
    const std::int64_t z0 = dims.z / 10;
    const std::int64_t z1 = dims.z - dims.z / 10;

    for (std::int64_t z = 0; z < dims.z; ++z)
        for (std::int64_t y = 0; y < dims.y; ++y)
            for (std::int64_t x = 0; x < dims.x; ++x) {
                const double ex = (static_cast<double>(x) - cx) / rx;
                const double ey = (static_cast<double>(y) - cy) / ry;
                const double ez = (static_cast<double>(z) - cz) / rz;
                if (ex * ex + ey * ey + ez * ez <= 1.0) v.at(x, y, z) = 0.6f;
                const double dx = static_cast<double>(x) - cx;
                const double dy = static_cast<double>(y) - cy;
                if (z >= z0 && z < z1 && dx * dx + dy * dy <= tube_radius * tube_radius) {
                    v.at(x, y, z) = 2.0f;
                    if (tube_mask) tube_mask->set(x, y, z, true);
                }
            }
    return v;
}

BinaryMask3 dilate26(const BinaryMask3& mask) {
    BinaryMask3 out(mask.dims, mask.spacing);
    const Dims3 d = mask.dims;
    for (std::int64_t z = 0; z < d.z; ++z)
        for (std::int64_t y = 0; y < d.y; ++y)
            for (std::int64_t x = 0; x < d.x; ++x) {
                bool any = false;
                for (std::int64_t dz = -1; dz <= 1 && !any; ++dz)
                    for (std::int64_t dy = -1; dy <= 1 && !any; ++dy)
                        for (std::int64_t dx = -1; dx <= 1 && !any; ++dx) {
                            const std::int64_t xx = x + dx, yy = y + dy, zz = z + dz;
                            if (xx < 0 || xx >= d.x || yy < 0 || yy >= d.y || zz < 0 || zz >= d.z)
                                continue;
                            any = mask.get(xx, yy, zz);
                        }
                out.set(x, y, z, any);
            }
    return out;
}

}  // namespace vesselprep::testing
