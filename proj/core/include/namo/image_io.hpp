#pragma once

#include <iosfwd>

#include "namo/perception.hpp"

namespace namo {

/// 16-bit binary PGM, big-endian samples. Depth is stored in millimeters
/// (rounded, clamped to 65535); 0 keeps meaning "no return".
void write_depth_pgm(const DepthImage& depth, std::ostream& out);
DepthImage read_depth_pgm(std::istream& in);

/// 16-bit binary PGM of object ids. Ids outside [0, 65535] are rejected.
void write_mask_pgm(const SegmentationMask& mask, std::ostream& out);
SegmentationMask read_mask_pgm(std::istream& in);

}  // namespace namo
