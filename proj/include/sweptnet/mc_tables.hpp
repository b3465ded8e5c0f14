#pragma once

#include <cstdint>

namespace sweptnet::mc {

extern const int kEdgeTable[256];
extern const int8_t kTriTable[256][16];
extern const int kEdgeCorners[12][2];
extern const int kCornerOffsets[8][3];

}  // namespace sweptnet::mc
