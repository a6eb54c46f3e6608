#pragma once

#include "radml/types.hpp"

#include <string>

namespace radml {

/// Reads a MetaImage header (.mhd) plus its raw payload.
/// Supported subset: NDims=3, DimSize, ElementSpacing,
/// ElementType in {MET_SHORT, MET_FLOAT, MET_UCHAR}, ElementDataFile
/// (a sibling file name, or LOCAL for payload appended to the header file).
/// Payload is little-endian, x-fastest.
ImageVolume read_image(const std::string& path);

/// Reads a mask volume; any element value > 0 becomes foreground.
RoiMask read_mask(const std::string& path);

/// Writes header + raw pair ("<stem>.mhd" and "<stem>.raw").
/// Values are cast to the volume's element kind; a round-trip through
/// write_image/read_image is bit-identical.
void write_image(const ImageVolume& volume, const std::string& path);
void write_mask(const RoiMask& mask, const std::string& path);

} // namespace radml
