#include "vesselprep/projection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "vesselprep/parallel.hpp"

namespace vesselprep {

ProjectionSet z_projections(const Volume3& vol, int threads) {
    const auto& d = vol.dims;
    if (d.z < 1) throw std::invalid_argument("z_projections: volume has no slices");

    ProjectionSet out{Image2(d.x, d.y), Image2(d.x, d.y), Image2(d.x, d.y)};
    const std::int64_t npix = d.x * d.y;
    const double inv_d = 1.0 / static_cast<double>(d.z);

    parallel_chunks(0, npix, threads, [&](std::int64_t p0, std::int64_t p1) {
        for (std::int64_t p = p0; p < p1; ++p) {
            const std::int64_t x = p % d.x;
            const std::int64_t y = p / d.x;
            double sum = 0.0, sumsq = 0.0;
            float mx = vol.data[static_cast<std::size_t>(voxel_index(d, x, y, 0))];
            for (std::int64_t z = 0; z < d.z; ++z) {
                const double v = vol.data[static_cast<std::size_t>(voxel_index(d, x, y, z))];
                sum += v;
                sumsq += v * v;
                mx = std::max(mx, static_cast<float>(v));
            }
            const double mean = sum * inv_d;
            const double var = std::max(0.0, sumsq * inv_d - mean * mean);
            out.aip.pixels[static_cast<std::size_t>(p)] = static_cast<float>(mean);
            out.mip.pixels[static_cast<std::size_t>(p)] = mx;
            out.ivm.pixels[static_cast<std::size_t>(p)] = static_cast<float>(std::sqrt(var));
        }
    });
    return out;
}

namespace {

// Nearest-rank threshold shared by the 2D and 3D percentile masks: the value
// at 0-based position ceil((1-p)*N) of the ascending-sorted data, clamped to
// the last element.
float nearest_rank_threshold(std::vector<float>& scratch, double p) {
    const std::size_t n = scratch.size();
    double pos = std::ceil((1.0 - p) * static_cast<double>(n));
    std::size_t k = pos <= 0.0 ? 0 : static_cast<std::size_t>(pos);
    if (k >= n) k = n - 1;
    std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k), scratch.end());
    return scratch[k];
}

}  // namespace

Mask2 top_percent_mask(const Image2& img, double p) {
    if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("top_percent_mask: p must be in (0, 1]");
    if (img.count() == 0) throw std::invalid_argument("top_percent_mask: empty image");

    std::vector<float> scratch = img.pixels;
    const float t = nearest_rank_threshold(scratch, p);

    Mask2 m(img.nx, img.ny);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) m.bits[i] = img.pixels[i] >= t ? 1 : 0;
    return m;
}

Mask2 merge_masks_and(const std::vector<Mask2>& masks) {
    if (masks.empty()) throw std::invalid_argument("merge_masks_and: no masks");
    Mask2 out = masks.front();
    for (std::size_t i = 1; i < masks.size(); ++i) {
        const Mask2& m = masks[i];
        if (m.nx != out.nx || m.ny != out.ny)
            throw std::invalid_argument("merge_masks_and: mask dimensions differ");
        for (std::size_t j = 0; j < out.bits.size(); ++j) out.bits[j] &= m.bits[j];
    }
    return out;
}

Mask2 remove_small_regions(const Mask2& mask, std::int64_t min_size, int connectivity) {
    if (connectivity != 4 && connectivity != 8)
        throw std::invalid_argument("remove_small_regions: connectivity must be 4 or 8");
    if (min_size < 0) throw std::invalid_argument("remove_small_regions: min_size must be >= 0");

    const std::int64_t nx = mask.nx, ny = mask.ny;
    Mask2 out = mask;
    std::vector<std::int32_t> label(mask.bits.size(), 0);
    std::vector<std::int64_t> stack;
    std::vector<std::int64_t> region;
    std::int32_t next = 0;

    static constexpr std::int64_t dx8[] = {1, -1, 0, 0, 1, 1, -1, -1};
    static constexpr std::int64_t dy8[] = {0, 0, 1, -1, 1, -1, 1, -1};
    const int ndirs = connectivity == 4 ? 4 : 8;

    for (std::int64_t start = 0; start < nx * ny; ++start) {
        if (!mask.bits[static_cast<std::size_t>(start)] || label[static_cast<std::size_t>(start)]) continue;
        ++next;
        region.clear();
        stack.assign(1, start);
        label[static_cast<std::size_t>(start)] = next;
        while (!stack.empty()) {
            const std::int64_t p = stack.back();
            stack.pop_back();
            region.push_back(p);
            const std::int64_t x = p % nx, y = p / nx;
            for (int k = 0; k < ndirs; ++k) {
                const std::int64_t xx = x + dx8[k], yy = y + dy8[k];
                if (xx < 0 || xx >= nx || yy < 0 || yy >= ny) continue;
                const std::int64_t q = xx + nx * yy;
                if (mask.bits[static_cast<std::size_t>(q)] && !label[static_cast<std::size_t>(q)]) {
                    label[static_cast<std::size_t>(q)] = next;
                    stack.push_back(q);
                }
            }
        }
        if (static_cast<std::int64_t>(region.size()) < min_size)
            for (std::int64_t p : region) out.bits[static_cast<std::size_t>(p)] = 0;
    }
    return out;
}

CropBox compute_crop_box(const Mask2& mask) {
    std::int64_t x0 = mask.nx, x1 = -1, y0 = mask.ny, y1 = -1;
    for (std::int64_t y = 0; y < mask.ny; ++y)
        for (std::int64_t x = 0; x < mask.nx; ++x)
            if (mask.get(x, y)) {
                x0 = std::min(x0, x);
                x1 = std::max(x1, x);
                y0 = std::min(y0, y);
                y1 = std::max(y1, y);
            }
    if (x1 < 0) throw std::invalid_argument("compute_crop_box: mask has no foreground");
    return CropBox{x0, x1 + 1, y0, y1 + 1};
}

CropPipelineResult crop_pipeline(const Volume3& vol, const CropParams& params, int threads) {
    const ProjectionSet proj = z_projections(vol, threads);
    const double p_aip = params.top_percent_aip.value_or(params.top_percent);
    const double p_mip = params.top_percent_mip.value_or(params.top_percent);
    const double p_ivm = params.top_percent_ivm.value_or(params.top_percent);

    std::vector<Mask2> masks;
    masks.push_back(top_percent_mask(proj.aip, p_aip));
    masks.push_back(top_percent_mask(proj.mip, p_mip));
    masks.push_back(top_percent_mask(proj.ivm, p_ivm));
    Mask2 merged = merge_masks_and(masks);
    merged = remove_small_regions(merged, params.min_region_px, params.region_connectivity);

    CropPipelineResult result;
    if (merged.popcount() == 0) {
        result.box = CropBox{0, vol.dims.x, 0, vol.dims.y};
        result.full_extent_fallback = true;
    } else {
        result.box = compute_crop_box(merged);
    }
    result.volume = apply_crop(vol, result.box);
    return result;
}

double cropping_rate(const Dims3& orig, const Dims3& cropped) {
    if (orig.x <= 0 || orig.y <= 0 || orig.z <= 0)
        throw std::invalid_argument("cropping_rate: original dims must be positive");
    if (cropped.x <= 0 || cropped.y <= 0 || cropped.z <= 0)
        throw std::invalid_argument("cropping_rate: cropped dims must be positive");
    if (cropped.x > orig.x || cropped.y > orig.y || cropped.z > orig.z)
        throw std::invalid_argument("cropping_rate: cropped dims exceed original dims");
    const std::int64_t n = orig.count();
    const std::int64_t m = cropped.count();
    return static_cast<double>(n - m) / static_cast<double>(n);
}

}  // namespace vesselprep
