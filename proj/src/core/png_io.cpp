#include <zlib.h>

#include <cstdio>
#include <cstring>
#include <vector>

#include "errors.hpp"
#include "preview.hpp"

namespace termstrip {
namespace {

void append_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                  const std::uint8_t* data, std::size_t size) {
  append_u32_be(out, static_cast<std::uint32_t>(size));
  const std::size_t type_at = out.size();
  out.insert(out.end(), type, type + 4);
  if (size > 0) out.insert(out.end(), data, data + size);
  const uLong crc = crc32(crc32(0L, Z_NULL, 0), out.data() + type_at,
                          static_cast<uInt>(4 + size));
  append_u32_be(out, static_cast<std::uint32_t>(crc));
}

}  // namespace

void write_png_rgb8(const std::string& path, const Image& image) {
  if (image.width <= 0 || image.height <= 0 ||
      image.rgb.size() != static_cast<std::size_t>(image.width) * image.height * 3)
    throw ValidationError("write_png_rgb8: image buffer does not match its size");

  // Raw stream: one filter byte (0 = None) followed by each scanline.
  const std::size_t stride = static_cast<std::size_t>(image.width) * 3;
  std::vector<std::uint8_t> raw((stride + 1) * static_cast<std::size_t>(image.height));
  for (int y = 0; y < image.height; ++y) {
    std::uint8_t* dst = raw.data() + static_cast<std::size_t>(y) * (stride + 1);
    *dst++ = 0;
    std::memcpy(dst, image.rgb.data() + static_cast<std::size_t>(y) * stride, stride);
  }

  uLongf compressed_size = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> compressed(compressed_size);
  if (compress2(compressed.data(), &compressed_size, raw.data(),
                static_cast<uLong>(raw.size()), Z_BEST_SPEED) != Z_OK)
    throw IoError("write_png_rgb8: deflate failed");
  compressed.resize(compressed_size);

  std::vector<std::uint8_t> png;
  png.reserve(compressed.size() + 128);
  static const std::uint8_t kSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  png.insert(png.end(), kSignature, kSignature + 8);

  std::uint8_t ihdr[13];
  ihdr[0] = static_cast<std::uint8_t>(image.width >> 24);
  ihdr[1] = static_cast<std::uint8_t>(image.width >> 16);
  ihdr[2] = static_cast<std::uint8_t>(image.width >> 8);
  ihdr[3] = static_cast<std::uint8_t>(image.width);
  ihdr[4] = static_cast<std::uint8_t>(image.height >> 24);
  ihdr[5] = static_cast<std::uint8_t>(image.height >> 16);
  ihdr[6] = static_cast<std::uint8_t>(image.height >> 8);
  ihdr[7] = static_cast<std::uint8_t>(image.height);
  ihdr[8] = 8;   // bit depth
  ihdr[9] = 2;   // color type: truecolor
  ihdr[10] = 0;  // compression
  ihdr[11] = 0;  // filter
  ihdr[12] = 0;  // interlace
  append_chunk(png, "IHDR", ihdr, sizeof(ihdr));
  append_chunk(png, "IDAT", compressed.data(), compressed.size());
  append_chunk(png, "IEND", nullptr, 0);

  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("write_png_rgb8: cannot open " + path);
  const std::size_t written = std::fwrite(png.data(), 1, png.size(), f);
  if (std::fclose(f) != 0 || written != png.size())
    throw IoError("write_png_rgb8: short write to " + path);
}

}  // namespace termstrip
