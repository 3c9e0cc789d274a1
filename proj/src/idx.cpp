#include "proboost/idx.hpp"

#include <cstdio>
#include <fstream>
#include <vector>

#include "proboost/errors.hpp"

namespace proboost {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

std::uint32_t read_u32_be(const std::vector<std::uint8_t>& bytes, std::size_t offset,
                          const std::string& path) {
    if (offset + 4 > bytes.size()) {
        throw FormatError(path + ": truncated header at byte offset " +
                          std::to_string(offset));
    }
    return (static_cast<std::uint32_t>(bytes[offset]) << 24) |
           (static_cast<std::uint32_t>(bytes[offset + 1]) << 16) |
           (static_cast<std::uint32_t>(bytes[offset + 2]) << 8) |
           static_cast<std::uint32_t>(bytes[offset + 3]);
}

void write_u32_be(std::ofstream& out, std::uint32_t v) {
    const char buf[4] = {static_cast<char>((v >> 24) & 0xFF),
                         static_cast<char>((v >> 16) & 0xFF),
                         static_cast<char>((v >> 8) & 0xFF),
                         static_cast<char>(v & 0xFF)};
    out.write(buf, 4);
}

}  // namespace

RawImageSet load_idx(const std::string& images_path, const std::string& labels_path) {
    const auto img_bytes = read_file(images_path);
    const std::uint32_t img_magic = read_u32_be(img_bytes, 0, images_path);
    if (img_magic != kImageMagic) {
        throw FormatError(images_path + ": bad image magic at byte offset 0 (got 0x" +
                          [&] {
                              char b[16];
                              std::snprintf(b, sizeof(b), "%08X", img_magic);
                              return std::string(b);
                          }() +
                          ", want 0x00000803)");
    }
    RawImageSet set;
    set.count = read_u32_be(img_bytes, 4, images_path);
    set.height = read_u32_be(img_bytes, 8, images_path);
    set.width = read_u32_be(img_bytes, 12, images_path);
    const std::size_t payload = set.count * set.height * set.width;
    if (img_bytes.size() != 16 + payload) {
        throw FormatError(images_path + ": payload length " +
                          std::to_string(img_bytes.size() - 16) +
                          " disagrees with declared element count " +
                          std::to_string(payload) + " at byte offset 16");
    }
    set.pixels.assign(img_bytes.begin() + 16, img_bytes.end());

    const auto lbl_bytes = read_file(labels_path);
    const std::uint32_t lbl_magic = read_u32_be(lbl_bytes, 0, labels_path);
    if (lbl_magic != kLabelMagic) {
        throw FormatError(labels_path + ": bad label magic at byte offset 0");
    }
    const std::uint32_t lbl_count = read_u32_be(lbl_bytes, 4, labels_path);
    if (lbl_bytes.size() != 8 + lbl_count) {
        throw FormatError(labels_path + ": payload length " +
                          std::to_string(lbl_bytes.size() - 8) +
                          " disagrees with declared count " + std::to_string(lbl_count) +
                          " at byte offset 8");
    }
    if (lbl_count != set.count) {
        throw FormatError(labels_path + ": label count " + std::to_string(lbl_count) +
                          " does not match image count " + std::to_string(set.count));
    }
    set.labels.reserve(lbl_count);
    for (std::size_t i = 0; i < lbl_count; ++i) {
        set.labels.push_back(static_cast<int>(lbl_bytes[8 + i]));
    }
    return set;
}

void save_idx(const RawImageSet& set, const std::string& images_path,
              const std::string& labels_path) {
    if (set.pixels.size() != set.count * set.height * set.width ||
        set.labels.size() != set.count) {
        throw FormatError("save_idx: inconsistent image set");
    }
    std::ofstream img(images_path, std::ios::binary);
    if (!img) throw FormatError("cannot open " + images_path + " for writing");
    write_u32_be(img, kImageMagic);
    write_u32_be(img, static_cast<std::uint32_t>(set.count));
    write_u32_be(img, static_cast<std::uint32_t>(set.height));
    write_u32_be(img, static_cast<std::uint32_t>(set.width));
    img.write(reinterpret_cast<const char*>(set.pixels.data()),
              static_cast<std::streamsize>(set.pixels.size()));

    std::ofstream lbl(labels_path, std::ios::binary);
    if (!lbl) throw FormatError("cannot open " + labels_path + " for writing");
    write_u32_be(lbl, kLabelMagic);
    write_u32_be(lbl, static_cast<std::uint32_t>(set.count));
    for (int y : set.labels) {
        const char b = static_cast<char>(static_cast<std::uint8_t>(y));
        lbl.write(&b, 1);
    }
}

}  // namespace proboost
