#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace vesselprep {

/// Voxel counts along the three axes. The first axis (x) corresponds to the
/// first NIfTI dimension, the third (z) to the slice direction.
struct Dims3 {
    std::int64_t x = 0;
    std::int64_t y = 0;
    std::int64_t z = 0;

    std::int64_t count() const { return x * y * z; }
    bool operator==(const Dims3&) const = default;
};

/// Physical voxel size in millimeters per axis.
struct Spacing3 {
    float sx = 1.0f;
    float sy = 1.0f;
    float sz = 1.0f;

    bool operator==(const Spacing3&) const = default;
};

/// Project-wide memory layout: x varies fastest, then y, then z. This matches
/// the NIfTI on-disk order, so file I/O is a straight copy. Every per-voxel
/// kernel in the library indexes through this one function.
inline std::int64_t voxel_index(const Dims3& d, std::int64_t x, std::int64_t y, std::int64_t z) {
    return x + d.x * (y + d.y * z);
}

/// Orientation fields carried through NIfTI round trips verbatim. They are
/// never interpreted; the toolkit operates in voxel space.
struct NiftiOrientation {
    std::int16_t qform_code = 0;
    std::int16_t sform_code = 0;
    std::array<float, 3> quatern = {0.0f, 0.0f, 0.0f};   // quatern_b, c, d
    std::array<float, 3> qoffset = {0.0f, 0.0f, 0.0f};
    std::array<float, 12> srow = {};                     // srow_x, srow_y, srow_z
    std::uint8_t xyzt_units = 2;                         // NIFTI_UNITS_MM

    bool operator==(const NiftiOrientation&) const = default;
};

/// A 3D scalar field. Immutable by convention after construction: operations
/// take it by const reference and return new volumes.
struct Volume3 {
    Dims3 dims;
    Spacing3 spacing;
    std::vector<float> data;           // dims.count() values, x fastest
    NiftiOrientation orientation;

    Volume3() = default;
    Volume3(Dims3 d, Spacing3 s, float fill = 0.0f)
        : dims(d), spacing(s), data(static_cast<std::size_t>(d.count()), fill) {}

    float& at(std::int64_t x, std::int64_t y, std::int64_t z) {
        return data[static_cast<std::size_t>(voxel_index(dims, x, y, z))];
    }
    float at(std::int64_t x, std::int64_t y, std::int64_t z) const {
        return data[static_cast<std::size_t>(voxel_index(dims, x, y, z))];
    }
};

/// A 3D boolean field aligned with a Volume3. Stored as 0/1 bytes.
struct BinaryMask3 {
    Dims3 dims;
    Spacing3 spacing;
    std::vector<std::uint8_t> bits;    // dims.count() values, x fastest
    NiftiOrientation orientation;

    BinaryMask3() = default;
    BinaryMask3(Dims3 d, Spacing3 s, bool fill = false)
        : dims(d), spacing(s), bits(static_cast<std::size_t>(d.count()), fill ? 1 : 0) {}

    bool get(std::int64_t x, std::int64_t y, std::int64_t z) const {
        return bits[static_cast<std::size_t>(voxel_index(dims, x, y, z))] != 0;
    }
    void set(std::int64_t x, std::int64_t y, std::int64_t z, bool v) {
        bits[static_cast<std::size_t>(voxel_index(dims, x, y, z))] = v ? 1 : 0;
    }
    std::int64_t popcount() const {
        std::int64_t n = 0;
        for (auto b : bits) n += b != 0;
        return n;
    }
};

/// 2D scalar field (projection image). Pixel (x, y) at index x + dims_x * y.
struct Image2 {
    std::int64_t nx = 0;
    std::int64_t ny = 0;
    std::vector<float> pixels;

    Image2() = default;
    Image2(std::int64_t w, std::int64_t h, float fill = 0.0f)
        : nx(w), ny(h), pixels(static_cast<std::size_t>(w * h), fill) {}

    float& at(std::int64_t x, std::int64_t y) { return pixels[static_cast<std::size_t>(x + nx * y)]; }
    float at(std::int64_t x, std::int64_t y) const { return pixels[static_cast<std::size_t>(x + nx * y)]; }
    std::int64_t count() const { return nx * ny; }
};

/// 2D boolean field aligned with an Image2.
struct Mask2 {
    std::int64_t nx = 0;
    std::int64_t ny = 0;
    std::vector<std::uint8_t> bits;

    Mask2() = default;
    Mask2(std::int64_t w, std::int64_t h, bool fill = false)
        : nx(w), ny(h), bits(static_cast<std::size_t>(w * h), fill ? 1 : 0) {}

    bool get(std::int64_t x, std::int64_t y) const { return bits[static_cast<std::size_t>(x + nx * y)] != 0; }
    void set(std::int64_t x, std::int64_t y, bool v) { bits[static_cast<std::size_t>(x + nx * y)] = v ? 1 : 0; }
    std::int64_t popcount() const {
        std::int64_t n = 0;
        for (auto b : bits) n += b != 0;
        return n;
    }
};

/// In-plane crop rectangle, half-open [x0,x1) x [y0,y1). The z extent is
/// never cropped; it always spans [0, dims.z).
struct CropBox {
    std::int64_t x0 = 0, x1 = 0;
    std::int64_t y0 = 0, y1 = 0;

    std::int64_t width() const { return x1 - x0; }
    std::int64_t height() const { return y1 - y0; }
    bool operator==(const CropBox&) const = default;
};

/// Rescales intensities to [0,1] with the affine map (v - min) / (max - min).
/// Throws std::invalid_argument for a constant volume (max == min).
Volume3 minmax_normalize(const Volume3& vol);

/// Extracts the in-plane crop box from a volume. Spacing is unchanged and the
/// z extent is preserved: output voxel (x,y,z) equals input (x+x0, y+y0, z).
/// Throws std::invalid_argument for an empty or out-of-bounds box.
Volume3 apply_crop(const Volume3& vol, const CropBox& box);

/// Convenience checks used by loaders and CLI entry points.
bool all_finite(const std::vector<float>& values);

}  // namespace vesselprep
