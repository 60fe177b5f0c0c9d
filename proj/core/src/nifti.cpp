#include "vesselprep/nifti.hpp"

#include <zlib.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace vesselprep {

namespace {

// NIfTI-1 datatype codes.
constexpr std::int16_t DT_UINT8 = 2;
constexpr std::int16_t DT_INT16 = 4;
constexpr std::int16_t DT_INT32 = 8;
constexpr std::int16_t DT_FLOAT32 = 16;
constexpr std::int16_t DT_FLOAT64 = 64;
constexpr std::int16_t DT_INT8 = 256;
constexpr std::int16_t DT_UINT16 = 512;
constexpr std::int16_t DT_UINT32 = 768;

#pragma pack(push, 1)
struct NiftiHeader {
    std::int32_t sizeof_hdr;      // must be 348
    char data_type[10];
    char db_name[18];
    std::int32_t extents;
    std::int16_t session_error;
    char regular;
    char dim_info;
    std::int16_t dim[8];
    float intent_p1, intent_p2, intent_p3;
    std::int16_t intent_code;
    std::int16_t datatype;
    std::int16_t bitpix;
    std::int16_t slice_start;
    float pixdim[8];
    float vox_offset;
    float scl_slope;
    float scl_inter;
    std::int16_t slice_end;
    char slice_code;
    char xyzt_units;
    float cal_max, cal_min;
    float slice_duration;
    float toffset;
    std::int32_t glmax, glmin;
    char descrip[80];
    char aux_file[24];
    std::int16_t qform_code;
    std::int16_t sform_code;
    float quatern_b, quatern_c, quatern_d;
    float qoffset_x, qoffset_y, qoffset_z;
    float srow_x[4];
    float srow_y[4];
    float srow_z[4];
    char intent_name[16];
    char magic[4];
};
#pragma pack(pop)
static_assert(sizeof(NiftiHeader) == 348, "NIfTI-1 header must be 348 bytes");

template <typename T>
void byteswap_inplace(T& v) {
    auto bytes = std::bit_cast<std::array<std::uint8_t, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    v = std::bit_cast<T>(bytes);
}

void swap_header(NiftiHeader& h) {
    byteswap_inplace(h.sizeof_hdr);
    byteswap_inplace(h.extents);
    byteswap_inplace(h.session_error);
    for (auto& d : h.dim) byteswap_inplace(d);
    byteswap_inplace(h.intent_p1);
    byteswap_inplace(h.intent_p2);
    byteswap_inplace(h.intent_p3);
    byteswap_inplace(h.intent_code);
    byteswap_inplace(h.datatype);
    byteswap_inplace(h.bitpix);
    byteswap_inplace(h.slice_start);
    for (auto& p : h.pixdim) byteswap_inplace(p);
    byteswap_inplace(h.vox_offset);
    byteswap_inplace(h.scl_slope);
    byteswap_inplace(h.scl_inter);
    byteswap_inplace(h.slice_end);
    byteswap_inplace(h.cal_max);
    byteswap_inplace(h.cal_min);
    byteswap_inplace(h.slice_duration);
    byteswap_inplace(h.toffset);
    byteswap_inplace(h.glmax);
    byteswap_inplace(h.glmin);
    byteswap_inplace(h.qform_code);
    byteswap_inplace(h.sform_code);
    byteswap_inplace(h.quatern_b);
    byteswap_inplace(h.quatern_c);
    byteswap_inplace(h.quatern_d);
    byteswap_inplace(h.qoffset_x);
    byteswap_inplace(h.qoffset_y);
    byteswap_inplace(h.qoffset_z);
    for (auto& v : h.srow_x) byteswap_inplace(v);
    for (auto& v : h.srow_y) byteswap_inplace(v);
    for (auto& v : h.srow_z) byteswap_inplace(v);
}

// gzread handles plain (uncompressed) files transparently, so one read path
// covers both .nii and .nii.gz.
struct GzReader {
    gzFile f = nullptr;
    explicit GzReader(const std::string& path) {
        f = gzopen(path.c_str(), "rb");
        if (!f) throw std::runtime_error("cannot open NIfTI file: " + path);
    }
    ~GzReader() {
        if (f) gzclose(f);
    }
    void read_exact(void* dst, std::size_t n, const std::string& path) {
        std::size_t got = 0;
        auto* p = static_cast<char*>(dst);
        while (got < n) {
            unsigned chunk = static_cast<unsigned>(std::min<std::size_t>(n - got, 1u << 30));
            int r = gzread(f, p + got, chunk);
            if (r <= 0) throw std::runtime_error("truncated NIfTI file: " + path);
            got += static_cast<std::size_t>(r);
        }
    }
    void skip(std::size_t n, const std::string& path) {
        std::vector<char> buf(std::min<std::size_t>(n, 65536));
        std::size_t left = n;
        while (left > 0) {
            unsigned chunk = static_cast<unsigned>(std::min(left, buf.size()));
            int r = gzread(f, buf.data(), chunk);
            if (r <= 0) throw std::runtime_error("truncated NIfTI file: " + path);
            left -= static_cast<std::size_t>(r);
        }
    }
};

template <typename Raw>
void convert_voxels(const std::vector<char>& raw, std::vector<float>& out, bool swap, float slope,
                    float inter) {
    const std::size_t n = out.size();
    const bool scale = slope != 0.0f && !(slope == 1.0f && inter == 0.0f);
    const Raw* src = reinterpret_cast<const Raw*>(raw.data());
    for (std::size_t i = 0; i < n; ++i) {
        Raw v = src[i];
        if (swap) byteswap_inplace(v);
        double x = static_cast<double>(v);
        if (scale) x = static_cast<double>(slope) * x + static_cast<double>(inter);
        out[i] = static_cast<float>(x);
    }
}

int bytes_per_voxel(std::int16_t datatype) {
    switch (datatype) {
        case DT_UINT8:
        case DT_INT8:
            return 1;
        case DT_INT16:
        case DT_UINT16:
            return 2;
        case DT_INT32:
        case DT_UINT32:
        case DT_FLOAT32:
            return 4;
        case DT_FLOAT64:
            return 8;
        default:
            return 0;
    }
}

NiftiOrientation orientation_from_header(const NiftiHeader& h) {
    NiftiOrientation o;
    o.qform_code = h.qform_code;
    o.sform_code = h.sform_code;
    o.quatern = {h.quatern_b, h.quatern_c, h.quatern_d};
    o.qoffset = {h.qoffset_x, h.qoffset_y, h.qoffset_z};
    for (int i = 0; i < 4; ++i) {
        o.srow[i] = h.srow_x[i];
        o.srow[4 + i] = h.srow_y[i];
        o.srow[8 + i] = h.srow_z[i];
    }
    o.xyzt_units = static_cast<std::uint8_t>(h.xyzt_units);
    return o;
}

void orientation_to_header(const NiftiOrientation& o, NiftiHeader& h) {
    h.qform_code = o.qform_code;
    h.sform_code = o.sform_code;
    h.quatern_b = o.quatern[0];
    h.quatern_c = o.quatern[1];
    h.quatern_d = o.quatern[2];
    h.qoffset_x = o.qoffset[0];
    h.qoffset_y = o.qoffset[1];
    h.qoffset_z = o.qoffset[2];
    for (int i = 0; i < 4; ++i) {
        h.srow_x[i] = o.srow[i];
        h.srow_y[i] = o.srow[4 + i];
        h.srow_z[i] = o.srow[8 + i];
    }
    h.xyzt_units = static_cast<char>(o.xyzt_units);
}

NiftiHeader make_header(const Dims3& dims, const Spacing3& spacing, std::int16_t datatype,
                        std::int16_t bitpix, const NiftiOrientation& orientation, bool two_d) {
    NiftiHeader h;
    std::memset(&h, 0, sizeof(h));
    h.sizeof_hdr = 348;
    h.regular = 'r';
    h.dim[0] = two_d ? 2 : 3;
    h.dim[1] = static_cast<std::int16_t>(dims.x);
    h.dim[2] = static_cast<std::int16_t>(dims.y);
    h.dim[3] = two_d ? 1 : static_cast<std::int16_t>(dims.z);
    for (int i = 4; i < 8; ++i) h.dim[i] = 1;
    h.datatype = datatype;
    h.bitpix = bitpix;
    h.pixdim[0] = 1.0f;
    h.pixdim[1] = spacing.sx;
    h.pixdim[2] = spacing.sy;
    h.pixdim[3] = spacing.sz;
    for (int i = 4; i < 8; ++i) h.pixdim[i] = 0.0f;
    h.vox_offset = 352.0f;
    h.scl_slope = 1.0f;
    h.scl_inter = 0.0f;
    orientation_to_header(orientation, h);
    std::memcpy(h.magic, "n+1", 4);
    return h;
}

void write_file(const std::string& path, const NiftiHeader& header, const void* voxels,
                std::size_t nbytes) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
        if (ec) throw std::runtime_error("cannot create directory for " + path + ": " + ec.message());
    }

    const char pad[4] = {0, 0, 0, 0};
    const bool gz = path.size() > 3 && path.compare(path.size() - 3, 3, ".gz") == 0;
    if (gz) {
        gzFile f = gzopen(path.c_str(), "wb1");
        if (!f) throw std::runtime_error("cannot open for writing: " + path);
        bool ok = gzwrite(f, &header, sizeof(header)) == static_cast<int>(sizeof(header)) &&
                  gzwrite(f, pad, 4) == 4;
        const char* src = static_cast<const char*>(voxels);
        std::size_t written = 0;
        while (ok && written < nbytes) {
            unsigned chunk = static_cast<unsigned>(std::min<std::size_t>(nbytes - written, 1u << 30));
            ok = gzwrite(f, src + written, chunk) == static_cast<int>(chunk);
            written += chunk;
        }
        int rc = gzclose(f);
        if (!ok || rc != Z_OK) throw std::runtime_error("write failed: " + path);
    } else {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open for writing: " + path);
        f.write(reinterpret_cast<const char*>(&header), sizeof(header));
        f.write(pad, 4);
        f.write(static_cast<const char*>(voxels), static_cast<std::streamsize>(nbytes));
        if (!f) throw std::runtime_error("write failed: " + path);
    }
}

}  // namespace

Volume3 load_nifti(const std::string& path) {
    if (!std::filesystem::exists(path)) throw std::runtime_error("NIfTI file not found: " + path);

    GzReader reader(path);
    NiftiHeader h;
    reader.read_exact(&h, sizeof(h), path);

    bool swap = false;
    if (h.sizeof_hdr != 348) {
        auto test = h;
        swap_header(test);
        if (test.sizeof_hdr != 348)
            throw std::runtime_error("corrupt NIfTI header (bad sizeof_hdr): " + path);
        h = test;
        swap = true;
    }
    if (std::strncmp(h.magic, "n+1", 3) != 0 && std::strncmp(h.magic, "ni1", 3) != 0)
        throw std::runtime_error("corrupt NIfTI header (bad magic): " + path);
    if (std::strncmp(h.magic, "ni1", 3) == 0)
        throw std::runtime_error("two-file NIfTI (.hdr/.img) is not supported: " + path);

    int ndim = h.dim[0];
    if (ndim < 3 || ndim > 7)
        throw std::runtime_error("unsupported NIfTI dimensionality (expected 3): " + path);
    for (int i = 4; i <= ndim; ++i)
        if (h.dim[i] > 1)
            throw std::runtime_error("unsupported NIfTI dimensionality (expected 3): " + path);

    const int bpv = bytes_per_voxel(h.datatype);
    if (bpv == 0)
        throw std::runtime_error("unsupported NIfTI datatype " + std::to_string(h.datatype) + ": " + path);

    Volume3 vol;
    vol.dims = {h.dim[1], h.dim[2], h.dim[3]};
    if (vol.dims.x <= 0 || vol.dims.y <= 0 || vol.dims.z <= 0)
        throw std::runtime_error("corrupt NIfTI header (non-positive dims): " + path);
    vol.spacing = {h.pixdim[1], h.pixdim[2], h.pixdim[3]};
    if (!(vol.spacing.sx > 0) || !(vol.spacing.sy > 0) || !(vol.spacing.sz > 0) ||
        !std::isfinite(vol.spacing.sx) || !std::isfinite(vol.spacing.sy) || !std::isfinite(vol.spacing.sz))
        throw std::runtime_error("corrupt NIfTI header (non-positive pixdim): " + path);
    vol.orientation = orientation_from_header(h);

    const std::size_t count = static_cast<std::size_t>(vol.dims.count());
    const std::size_t offset = static_cast<std::size_t>(h.vox_offset);
    if (offset < sizeof(NiftiHeader))
        throw std::runtime_error("corrupt NIfTI header (vox_offset < 348): " + path);
    reader.skip(offset - sizeof(NiftiHeader), path);

    std::vector<char> raw(count * static_cast<std::size_t>(bpv));
    reader.read_exact(raw.data(), raw.size(), path);

    vol.data.resize(count);
    const float slope = h.scl_slope;
    const float inter = h.scl_inter;
    switch (h.datatype) {
        case DT_UINT8: convert_voxels<std::uint8_t>(raw, vol.data, swap, slope, inter); break;
        case DT_INT8: convert_voxels<std::int8_t>(raw, vol.data, swap, slope, inter); break;
        case DT_INT16: convert_voxels<std::int16_t>(raw, vol.data, swap, slope, inter); break;
        case DT_UINT16: convert_voxels<std::uint16_t>(raw, vol.data, swap, slope, inter); break;
        case DT_INT32: convert_voxels<std::int32_t>(raw, vol.data, swap, slope, inter); break;
        case DT_UINT32: convert_voxels<std::uint32_t>(raw, vol.data, swap, slope, inter); break;
        case DT_FLOAT32: convert_voxels<float>(raw, vol.data, swap, slope, inter); break;
        case DT_FLOAT64: convert_voxels<double>(raw, vol.data, swap, slope, inter); break;
        default: throw std::runtime_error("unsupported NIfTI datatype: " + path);
    }

    if (!all_finite(vol.data))
        throw std::runtime_error("NIfTI volume contains NaN or Inf voxels, refusing to load: " + path);
    return vol;
}

void save_nifti(const Volume3& vol, const std::string& path) {
    NiftiHeader h = make_header(vol.dims, vol.spacing, DT_FLOAT32, 32, vol.orientation, false);
    write_file(path, h, vol.data.data(), vol.data.size() * sizeof(float));
}

void save_nifti(const BinaryMask3& mask, const std::string& path) {
    NiftiHeader h = make_header(mask.dims, mask.spacing, DT_UINT8, 8, mask.orientation, false);
    write_file(path, h, mask.bits.data(), mask.bits.size());
}

void save_nifti(const Image2& img, const std::string& path, const Spacing3& spacing) {
    NiftiHeader h = make_header({img.nx, img.ny, 1}, spacing, DT_FLOAT32, 32, {}, true);
    write_file(path, h, img.pixels.data(), img.pixels.size() * sizeof(float));
}

BinaryMask3 volume_to_mask(const Volume3& vol) {
    BinaryMask3 m;
    m.dims = vol.dims;
    m.spacing = vol.spacing;
    m.orientation = vol.orientation;
    m.bits.resize(vol.data.size());
    for (std::size_t i = 0; i < vol.data.size(); ++i) m.bits[i] = vol.data[i] > 0.5f ? 1 : 0;
    return m;
}

}  // namespace vesselprep
