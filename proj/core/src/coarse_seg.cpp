#include "vesselprep/coarse_seg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace vesselprep {

void CoarseSegParams::validate() const {
    if (!(top_percent > 0.0) || top_percent > 1.0)
        throw std::invalid_argument("CoarseSegParams: top_percent must be in (0, 1]");
    if (k < 1) throw std::invalid_argument("CoarseSegParams: k must be >= 1");
    if (connectivity != 6 && connectivity != 18 && connectivity != 26)
        throw std::invalid_argument("CoarseSegParams: connectivity must be 6, 18 or 26");
}

BinaryMask3 threshold_top_percent_3d(const Volume3& vei, double p, bool only_nonzero) {
    if (!(p > 0.0) || p > 1.0)
        throw std::invalid_argument("threshold_top_percent_3d: p must be in (0, 1]");
    if (vei.data.empty()) throw std::invalid_argument("threshold_top_percent_3d: empty volume");

    std::vector<float> scratch;
    if (only_nonzero) {
        scratch.reserve(vei.data.size());
        for (float v : vei.data)
            if (v != 0.0f) scratch.push_back(v);
    } else {
        scratch = vei.data;
    }

    BinaryMask3 out(vei.dims, vei.spacing, false);
    out.orientation = vei.orientation;
    if (scratch.empty()) return out;  // only_nonzero with an all-zero volume

    const std::size_t n = scratch.size();
    double pos = std::ceil((1.0 - p) * static_cast<double>(n));
    std::size_t k = pos <= 0.0 ? 0 : static_cast<std::size_t>(pos);
    if (k >= n) k = n - 1;
    std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k), scratch.end());
    const float t = scratch[k];

    for (std::size_t i = 0; i < vei.data.size(); ++i) {
        const float v = vei.data[i];
        out.bits[i] = (v >= t && (!only_nonzero || v != 0.0f)) ? 1 : 0;
    }
    return out;
}

namespace {

struct UnionFind {
    std::vector<std::int32_t> parent;

    std::int32_t make() {
        parent.push_back(static_cast<std::int32_t>(parent.size()));
        return parent.back();
    }
    std::int32_t find(std::int32_t a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    }
    void unite(std::int32_t a, std::int32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a < b) parent[b] = a;  // keep the smaller root for determinism
        else parent[a] = b;
    }
};

// Offsets with positive linear index (the "already visited" half of the
// neighborhood under x-fastest scanning).
std::vector<std::array<std::int64_t, 3>> backward_offsets(int connectivity) {
    std::vector<std::array<std::int64_t, 3>> offs;
    for (std::int64_t dz = -1; dz <= 1; ++dz)
        for (std::int64_t dy = -1; dy <= 1; ++dy)
            for (std::int64_t dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0 && dz == 0) continue;
                const int manhattan = static_cast<int>(std::abs(dx) + std::abs(dy) + std::abs(dz));
                if (connectivity == 6 && manhattan > 1) continue;
                if (connectivity == 18 && manhattan > 2) continue;
                // backward means lexicographically before (z, y, x) scan order
                if (dz < 0 || (dz == 0 && dy < 0) || (dz == 0 && dy == 0 && dx < 0))
                    offs.push_back({dx, dy, dz});
            }
    return offs;
}

}  // namespace

LabeledComponents connected_components_3d(const BinaryMask3& mask, int connectivity) {
    if (connectivity != 6 && connectivity != 18 && connectivity != 26)
        throw std::invalid_argument("connected_components_3d: connectivity must be 6, 18 or 26");

    const Dims3 d = mask.dims;
    LabeledComponents out;
    out.dims = d;
    out.labels.assign(static_cast<std::size_t>(d.count()), 0);

    const auto offs = backward_offsets(connectivity);
    UnionFind uf;
    uf.make();  // slot 0 = background, never united

    // Two-pass labeling: provisional labels with union-find, then a
    // deterministic relabel by (size desc, first voxel asc).
    std::vector<std::int32_t> provisional(static_cast<std::size_t>(d.count()), 0);
    for (std::int64_t z = 0; z < d.z; ++z)
        for (std::int64_t y = 0; y < d.y; ++y)
            for (std::int64_t x = 0; x < d.x; ++x) {
                const std::int64_t i = voxel_index(d, x, y, z);
                if (!mask.bits[static_cast<std::size_t>(i)]) continue;
                std::int32_t lab = 0;
                for (const auto& o : offs) {
                    const std::int64_t xx = x + o[0], yy = y + o[1], zz = z + o[2];
                    if (xx < 0 || xx >= d.x || yy < 0 || yy >= d.y || zz < 0 || zz >= d.z) continue;
                    const std::int32_t nl =
                        provisional[static_cast<std::size_t>(voxel_index(d, xx, yy, zz))];
                    if (nl == 0) continue;
                    if (lab == 0) lab = uf.find(nl);
                    else uf.unite(lab, nl);
                }
                if (lab == 0) lab = uf.make();
                provisional[static_cast<std::size_t>(i)] = lab;
            }

    // Roots -> component stats in first-voxel order.
    const std::int32_t nprov = static_cast<std::int32_t>(uf.parent.size());
    std::vector<std::int32_t> root_to_comp(static_cast<std::size_t>(nprov), -1);
    struct Comp {
        std::int64_t size = 0;
        std::int64_t first_voxel = 0;
    };
    std::vector<Comp> comps;
    for (std::size_t i = 0; i < provisional.size(); ++i) {
        const std::int32_t p = provisional[i];
        if (p == 0) continue;
        const std::int32_t r = uf.find(p);
        if (root_to_comp[static_cast<std::size_t>(r)] < 0) {
            root_to_comp[static_cast<std::size_t>(r)] = static_cast<std::int32_t>(comps.size());
            comps.push_back({0, static_cast<std::int64_t>(i)});
        }
        ++comps[static_cast<std::size_t>(root_to_comp[static_cast<std::size_t>(r)])].size;
    }

    std::vector<std::int32_t> order(comps.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
        if (comps[static_cast<std::size_t>(a)].size != comps[static_cast<std::size_t>(b)].size)
            return comps[static_cast<std::size_t>(a)].size > comps[static_cast<std::size_t>(b)].size;
        return comps[static_cast<std::size_t>(a)].first_voxel < comps[static_cast<std::size_t>(b)].first_voxel;
    });
    std::vector<std::int32_t> comp_to_final(comps.size());
    out.sizes.resize(comps.size());
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        comp_to_final[static_cast<std::size_t>(order[rank])] = static_cast<std::int32_t>(rank + 1);
        out.sizes[rank] = comps[static_cast<std::size_t>(order[rank])].size;
    }

    for (std::size_t i = 0; i < provisional.size(); ++i) {
        const std::int32_t p = provisional[i];
        if (p == 0) continue;
        out.labels[i] =
            comp_to_final[static_cast<std::size_t>(root_to_comp[static_cast<std::size_t>(uf.find(p))])];
    }
    return out;
}

BinaryMask3 keep_largest_k(const LabeledComponents& comps, int k, const Spacing3& spacing) {
    if (k < 1) throw std::invalid_argument("keep_largest_k: k must be >= 1");
    BinaryMask3 out(comps.dims, spacing, false);
    for (std::size_t i = 0; i < comps.labels.size(); ++i) {
        const std::int32_t l = comps.labels[i];
        out.bits[i] = (l >= 1 && l <= k) ? 1 : 0;
    }
    return out;
}

BinaryMask3 coarse_segmentation(const Volume3& vei, const CoarseSegParams& params) {
    params.validate();
    const BinaryMask3 thresholded = threshold_top_percent_3d(vei, params.top_percent, params.only_nonzero);
    const LabeledComponents comps = connected_components_3d(thresholded, params.connectivity);
    BinaryMask3 cvs = keep_largest_k(comps, params.k, vei.spacing);
    cvs.orientation = vei.orientation;
    return cvs;
}

}  // namespace vesselprep
