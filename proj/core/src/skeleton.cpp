#include "vesselprep/skeleton.hpp"

#include <array>
#include <cstdlib>
#include <vector>

namespace vesselprep {

namespace {

// The 3x3x3 neighborhood is flattened to 27 cells, (dx+1) + 3*(dy+1) + 9*(dz+1).
constexpr int kCenter = 13;

struct CubeTables {
    // 26-adjacency between cube cells (Chebyshev distance 1).
    std::array<std::array<std::int8_t, 26>, 27> adj26{};
    std::array<std::int8_t, 27> adj26_count{};
    // 6-adjacency between cube cells (Manhattan distance 1).
    std::array<std::array<std::int8_t, 6>, 27> adj6{};
    std::array<std::int8_t, 27> adj6_count{};
    std::array<bool, 27> in_n18{};        // shares a face or edge with the center
    std::array<bool, 27> is_face{};       // the six face neighbors

    CubeTables() {
        auto coord = [](int c) { return std::array<int, 3>{c % 3 - 1, (c / 3) % 3 - 1, c / 9 - 1}; };
        for (int a = 0; a < 27; ++a) {
            const auto ca = coord(a);
            const int manhattan = std::abs(ca[0]) + std::abs(ca[1]) + std::abs(ca[2]);
            in_n18[a] = a != kCenter && manhattan <= 2;
            is_face[a] = manhattan == 1;
            for (int b = 0; b < 27; ++b) {
                if (a == b) continue;
                const auto cb = coord(b);
                const int dx = std::abs(ca[0] - cb[0]);
                const int dy = std::abs(ca[1] - cb[1]);
                const int dz = std::abs(ca[2] - cb[2]);
                if (std::max({dx, dy, dz}) == 1)
                    adj26[a][static_cast<std::size_t>(adj26_count[a]++)] = static_cast<std::int8_t>(b);
                if (dx + dy + dz == 1)
                    adj6[a][static_cast<std::size_t>(adj6_count[a]++)] = static_cast<std::int8_t>(b);
            }
        }
    }
};

const CubeTables& tables() {
    static const CubeTables t;
    return t;
}

// Number of 26-connected foreground components among the 26 neighbors.
int t26(const std::array<bool, 27>& nb) {
    const auto& t = tables();
    std::array<bool, 27> seen{};
    int components = 0;
    std::array<std::int8_t, 27> stack;
    for (int s = 0; s < 27; ++s) {
        if (s == kCenter || !nb[s] || seen[s]) continue;
        ++components;
        int top = 0;
        stack[top++] = static_cast<std::int8_t>(s);
        seen[s] = true;
        while (top > 0) {
            const int c = stack[--top];
            for (int i = 0; i < t.adj26_count[c]; ++i) {
                const int n = t.adj26[c][static_cast<std::size_t>(i)];
                if (n == kCenter || !nb[n] || seen[n]) continue;
                seen[n] = true;
                stack[top++] = static_cast<std::int8_t>(n);
            }
        }
    }
    return components;
}

// Number of 6-connected background components of the 18-neighborhood that
// touch one of the six face neighbors.
int t6(const std::array<bool, 27>& nb) {
    const auto& t = tables();
    std::array<bool, 27> seen{};
    int components = 0;
    std::array<std::int8_t, 27> stack;
    for (int s = 0; s < 27; ++s) {
        if (!t.is_face[s] || nb[s] || seen[s]) continue;  // seeds: background face neighbors
        ++components;
        int top = 0;
        stack[top++] = static_cast<std::int8_t>(s);
        seen[s] = true;
        while (top > 0) {
            const int c = stack[--top];
            for (int i = 0; i < t.adj6_count[c]; ++i) {
                const int n = t.adj6[c][static_cast<std::size_t>(i)];
                if (!t.in_n18[n] || nb[n] || seen[n]) continue;
                seen[n] = true;
                stack[top++] = static_cast<std::int8_t>(n);
            }
        }
    }
    return components;
}

bool is_simple(const std::array<bool, 27>& nb) { return t26(nb) == 1 && t6(nb) == 1; }

bool is_endpoint(const std::array<bool, 27>& nb) {
    int count = 0;
    for (int i = 0; i < 27; ++i) count += (i != kCenter && nb[i]) ? 1 : 0;
    return count == 1;
}

}  // namespace

BinaryMask3 skeletonize_3d(const BinaryMask3& mask) {
    const Dims3 d = mask.dims;
    BinaryMask3 out = mask;

    // Foreground bounding box; empty masks return immediately.
    std::int64_t bx0 = d.x, bx1 = -1, by0 = d.y, by1 = -1, bz0 = d.z, bz1 = -1;
    for (std::int64_t z = 0; z < d.z; ++z)
        for (std::int64_t y = 0; y < d.y; ++y)
            for (std::int64_t x = 0; x < d.x; ++x)
                if (out.get(x, y, z)) {
                    bx0 = std::min(bx0, x); bx1 = std::max(bx1, x);
                    by0 = std::min(by0, y); by1 = std::max(by1, y);
                    bz0 = std::min(bz0, z); bz1 = std::max(bz1, z);
                }
    if (bx1 < 0) return out;

    auto fg = [&](std::int64_t x, std::int64_t y, std::int64_t z) {
        if (x < 0 || x >= d.x || y < 0 || y >= d.y || z < 0 || z >= d.z) return false;
        return out.get(x, y, z);
    };
    auto gather = [&](std::int64_t x, std::int64_t y, std::int64_t z, std::array<bool, 27>& nb) {
        int i = 0;
        for (std::int64_t dz = -1; dz <= 1; ++dz)
            for (std::int64_t dy = -1; dy <= 1; ++dy)
                for (std::int64_t dx = -1; dx <= 1; ++dx) nb[i++] = fg(x + dx, y + dy, z + dz);
    };

    static constexpr std::int64_t kDirs[6][3] = {
        {0, -1, 0}, {0, 1, 0}, {-1, 0, 0}, {1, 0, 0}, {0, 0, -1}, {0, 0, 1}};

    std::vector<std::array<std::int64_t, 3>> candidates;
    std::array<bool, 27> nb;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& dir : kDirs) {
            candidates.clear();
            for (std::int64_t z = bz0; z <= bz1; ++z)
                for (std::int64_t y = by0; y <= by1; ++y)
                    for (std::int64_t x = bx0; x <= bx1; ++x) {
                        if (!out.get(x, y, z)) continue;
                        if (fg(x + dir[0], y + dir[1], z + dir[2])) continue;  // not a border point
                        gather(x, y, z, nb);
                        if (is_endpoint(nb) || !is_simple(nb)) continue;
                        candidates.push_back({x, y, z});
                    }
            // Sequential recheck: earlier deletions in this subiteration can
            // change a candidate's neighborhood.
            for (const auto& p : candidates) {
                gather(p[0], p[1], p[2], nb);
                if (is_endpoint(nb) || !is_simple(nb)) continue;
                out.set(p[0], p[1], p[2], false);
                changed = true;
            }
        }
    }
    return out;
}

}  // namespace vesselprep
