#include "vesselprep/volume.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vesselprep {

Volume3 minmax_normalize(const Volume3& vol) {
    if (vol.data.empty()) throw std::invalid_argument("minmax_normalize: empty volume");
    auto [mn_it, mx_it] = std::minmax_element(vol.data.begin(), vol.data.end());
    const float mn = *mn_it, mx = *mx_it;
    if (!(mx > mn))
        throw std::invalid_argument("minmax_normalize: degenerate constant volume (max == min)");
    Volume3 out = vol;
    const float inv = 1.0f / (mx - mn);
    for (auto& v : out.data) v = (v - mn) * inv;
    return out;
}

Volume3 apply_crop(const Volume3& vol, const CropBox& box) {
    if (box.x0 >= box.x1 || box.y0 >= box.y1)
        throw std::invalid_argument("apply_crop: empty crop box");
    if (box.x0 < 0 || box.y0 < 0 || box.x1 > vol.dims.x || box.y1 > vol.dims.y)
        throw std::invalid_argument("apply_crop: crop box out of volume bounds");

    Volume3 out;
    out.dims = {box.width(), box.height(), vol.dims.z};
    out.spacing = vol.spacing;
    out.orientation = vol.orientation;
    out.data.resize(static_cast<std::size_t>(out.dims.count()));

    for (std::int64_t z = 0; z < out.dims.z; ++z) {
        for (std::int64_t y = 0; y < out.dims.y; ++y) {
            const float* src = vol.data.data() + voxel_index(vol.dims, box.x0, box.y0 + y, z);
            float* dst = out.data.data() + voxel_index(out.dims, 0, y, z);
            std::copy(src, src + out.dims.x, dst);
        }
    }
    return out;
}

bool all_finite(const std::vector<float>& values) {
    for (float v : values)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace vesselprep
