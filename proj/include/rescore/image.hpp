#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <zlib.h>

#include "rescore/errors.hpp"

namespace rescore::image {

struct PngInfo {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::uint8_t bit_depth = 0;
    std::uint8_t color_type = 0;
};

namespace detail {

inline constexpr std::array<std::uint8_t, 8> kPngSignature{
    0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

inline std::uint32_t read_be32(const std::uint8_t* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
           (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

inline void append_be32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>((v >> 24) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>(v & 0xff));
}

inline void append_chunk(std::string& out, const char tag[4], std::string_view data) {
    append_be32(out, static_cast<std::uint32_t>(data.size()));
    std::string body(tag, 4);
    body.append(data);
    out.append(body);
    auto crc = crc32(0L, reinterpret_cast<const Bytef*>(body.data()),
                     static_cast<uInt>(body.size()));
    append_be32(out, static_cast<std::uint32_t>(crc));
}

} // namespace detail

/// Parses the PNG signature and IHDR chunk. Returns nullopt for files
/// that are absent, truncated, or not PNG.
inline std::optional<PngInfo> probe_png(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::uint8_t head[8 + 8 + 13];
    in.read(reinterpret_cast<char*>(head), sizeof(head));
    if (in.gcount() != static_cast<std::streamsize>(sizeof(head))) return std::nullopt;
    if (std::memcmp(head, detail::kPngSignature.data(), 8) != 0) return std::nullopt;
    if (detail::read_be32(head + 8) != 13) return std::nullopt;
    if (std::memcmp(head + 12, "IHDR", 4) != 0) return std::nullopt;
    PngInfo info;
    info.width = detail::read_be32(head + 16);
    info.height = detail::read_be32(head + 20);
    info.bit_depth = head[24];
    info.color_type = head[25];
    if (info.width == 0 || info.height == 0) return std::nullopt;
    switch (info.bit_depth) {
        case 1: case 2: case 4: case 8: case 16: break;
        default: return std::nullopt;
    }
    switch (info.color_type) {
        case 0: case 2: case 3: case 4: case 6: break;
        default: return std::nullopt;
    }
    return info;
}

inline bool is_readable_image(const std::filesystem::path& path) {
    return probe_png(path).has_value();
}

/// Encodes an 8-bit RGB buffer (row-major, 3 bytes per pixel) as a PNG file.
inline void write_rgb_png(const std::filesystem::path& path, std::uint32_t width,
                          std::uint32_t height, const std::vector<std::uint8_t>& rgb) {
    if (rgb.size() != static_cast<std::size_t>(width) * height * 3)
        throw Error("write_rgb_png: buffer size does not match dimensions");

    std::string raw;
    raw.reserve((static_cast<std::size_t>(width) * 3 + 1) * height);
    for (std::uint32_t y = 0; y < height; ++y) {
        raw.push_back('\0'); // filter type 0
        raw.append(reinterpret_cast<const char*>(rgb.data()) +
                       static_cast<std::size_t>(y) * width * 3,
                   static_cast<std::size_t>(width) * 3);
    }

    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::string compressed(bound, '\0');
    if (compress2(reinterpret_cast<Bytef*>(compressed.data()), &bound,
                  reinterpret_cast<const Bytef*>(raw.data()),
                  static_cast<uLong>(raw.size()), 9) != Z_OK)
        throw Error("write_rgb_png: zlib compression failed");
    compressed.resize(bound);

    std::string ihdr;
    detail::append_be32(ihdr, width);
    detail::append_be32(ihdr, height);
    ihdr.push_back(8);  // bit depth
    ihdr.push_back(2);  // color type: truecolor
    ihdr.push_back(0);
    ihdr.push_back(0);
    ihdr.push_back(0);

    std::string out(reinterpret_cast<const char*>(detail::kPngSignature.data()), 8);
    detail::append_chunk(out, "IHDR", ihdr);
    detail::append_chunk(out, "IDAT", compressed);
    detail::append_chunk(out, "IEND", "");

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("write_rgb_png: cannot open " + path.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
}

/// Small procedural canvas used for synthetic fixtures and demo assets.
class Canvas {
public:
    Canvas(std::uint32_t width, std::uint32_t height, std::array<std::uint8_t, 3> fill = {255, 255, 255})
        : width_(width), height_(height), px_(static_cast<std::size_t>(width) * height * 3) {
        for (std::size_t i = 0; i < px_.size(); i += 3) {
            px_[i] = fill[0];
            px_[i + 1] = fill[1];
            px_[i + 2] = fill[2];
        }
    }

    std::uint32_t width() const { return width_; }
    std::uint32_t height() const { return height_; }

    void set(int x, int y, std::array<std::uint8_t, 3> rgb) {
        if (x < 0 || y < 0 || x >= static_cast<int>(width_) || y >= static_cast<int>(height_)) return;
        std::size_t i = (static_cast<std::size_t>(y) * width_ + static_cast<std::size_t>(x)) * 3;
        px_[i] = rgb[0];
        px_[i + 1] = rgb[1];
        px_[i + 2] = rgb[2];
    }

    void fill_rect(int x, int y, int w, int h, std::array<std::uint8_t, 3> rgb) {
        for (int yy = y; yy < y + h; ++yy)
            for (int xx = x; xx < x + w; ++xx) set(xx, yy, rgb);
    }

    void rect_outline(int x, int y, int w, int h, std::array<std::uint8_t, 3> rgb) {
        for (int xx = x; xx < x + w; ++xx) {
            set(xx, y, rgb);
            set(xx, y + h - 1, rgb);
        }
        for (int yy = y; yy < y + h; ++yy) {
            set(x, yy, rgb);
            set(x + w - 1, yy, rgb);
        }
    }

    void line(int x0, int y0, int x1, int y1, std::array<std::uint8_t, 3> rgb) {
        int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
        int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
        int err = dx + dy;
        while (true) {
            set(x0, y0, rgb);
            if (x0 == x1 && y0 == y1) break;
            int e2 = 2 * err;
            if (e2 >= dy) { err += dy; x0 += sx; }
            if (e2 <= dx) { err += dx; y0 += sy; }
        }
    }

    void save(const std::filesystem::path& path) const {
        write_rgb_png(path, width_, height_, px_);
    }

private:
    std::uint32_t width_;
    std::uint32_t height_;
    std::vector<std::uint8_t> px_;
};

} // namespace rescore::image
