#pragma once

#include <string>

#include "vesselprep/volume.hpp"

namespace vesselprep {

/// Loads a 3D NIfTI-1 file (.nii or .nii.gz), converting voxels to float and
/// applying scl_slope / scl_inter when the slope is nonzero. Accepts scalar
/// integer (8/16/32 bit, signed or unsigned) and float (32/64 bit) datatypes,
/// little- or big-endian. Trailing singleton dimensions are tolerated.
///
/// Throws std::runtime_error on: missing file, corrupt header, unsupported
/// datatype, dimensionality other than 3, or non-finite voxels.
Volume3 load_nifti(const std::string& path);

/// Writes a volume as single-file NIfTI-1, float32, scl (1, 0). Orientation
/// fields carried on the volume are written back verbatim. Paths ending in
/// .gz are gzip-compressed. Missing parent directories are created.
void save_nifti(const Volume3& vol, const std::string& path);

/// Writes a mask as 8-bit NIfTI-1 with voxel values {0, 1}.
void save_nifti(const BinaryMask3& mask, const std::string& path);

/// Writes a 2D image (e.g. a projection) as a 2-dimensional float32 NIfTI-1.
void save_nifti(const Image2& img, const std::string& path, const Spacing3& spacing = {});

/// Interprets a loaded volume as a binary mask: voxels > 0.5 become true.
BinaryMask3 volume_to_mask(const Volume3& vol);

}  // namespace vesselprep
