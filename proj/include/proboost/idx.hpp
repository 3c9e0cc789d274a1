#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace proboost {

/// Raw 8-bit image set, pixels in [0, 255], one integer label per image.
struct RawImageSet {
    std::size_t count = 0;
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<std::uint8_t> pixels;  // count * height * width, row-major
    std::vector<int> labels;
};

/// Parse a big-endian IDX image/label file pair (magic 0x00000803 for 3-D u8
/// images, 0x00000801 for labels). Bad magic, truncated payloads, and count
/// mismatches raise FormatError carrying the failing byte offset.
RawImageSet load_idx(const std::string& images_path, const std::string& labels_path);

/// Inverse of load_idx; emits the same big-endian container.
void save_idx(const RawImageSet& set, const std::string& images_path,
              const std::string& labels_path);

}  // namespace proboost
