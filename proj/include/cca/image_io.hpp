#pragma once

// File loading and PNG writing. Needs libpng at link time; kept separate from
// the core headers so library users without file I/O do not pay the
// dependency.

#include <png.h>

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "cca/image.hpp"
#include "cca/pfm.hpp"

namespace cca {

struct LoadedImage {
  std::vector<Image> channels;  // 1 (gray) or 3 (rgb)
};

namespace detail {

struct FileCloser {
  FILE* f = nullptr;
  ~FileCloser() {
    if (f) std::fclose(f);
  }
};

inline LoadedImage load_png(const std::string& path) {
  FileCloser fc;
  fc.f = std::fopen(path.c_str(), "rb");
  require(fc.f != nullptr, "load_png: cannot open " + path);

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  require(png != nullptr, "load_png: png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw InputError("load_png: png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw InputError("load_png: failed to decode " + path);
  }
  png_init_io(png, fc.f);
  png_read_info(png, info);

  png_uint_32 w = png_get_image_width(png, info);
  png_uint_32 h = png_get_image_height(png, info);
  int depth = png_get_bit_depth(png, info);
  int color = png_get_color_type(png, info);

  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  if (depth == 16) png_set_swap(png);  // stream is big-endian
  png_read_update_info(png, info);

  color = png_get_color_type(png, info);
  depth = png_get_bit_depth(png, info);
  int nch = (color == PNG_COLOR_TYPE_RGB) ? 3 : 1;
  double denom = depth == 16 ? 65535.0 : 255.0;

  std::vector<png_byte> rowbuf(png_get_rowbytes(png, info));
  LoadedImage out;
  out.channels.assign(nch, Image(int(w), int(h)));
  for (png_uint_32 y = 0; y < h; ++y) {
    png_read_row(png, rowbuf.data(), nullptr);
    for (png_uint_32 x = 0; x < w; ++x) {
      for (int c = 0; c < nch; ++c) {
        double v;
        if (depth == 16) {
          const uint16_t* p16 = reinterpret_cast<const uint16_t*>(rowbuf.data());
          v = p16[x * nch + c];
        } else {
          v = rowbuf[x * nch + c];
        }
        out.channels[c](int(x), int(y)) = float(v / denom);
      }
    }
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

inline LoadedImage load_pnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "load_pnm: cannot open " + path);
  std::string magic;
  in >> magic;
  require(magic == "P5" || magic == "P6", "load_pnm: unsupported format");
  int nch = magic == "P6" ? 3 : 1;

  auto next_int = [&]() {
    // skip whitespace and '#' comments
    for (;;) {
      int ch = in.peek();
      if (ch == '#') {
        std::string line;
        std::getline(in, line);
      } else if (std::isspace(ch)) {
        in.get();
      } else {
        break;
      }
    }
    long v;
    in >> v;
    require(in.good(), "load_pnm: malformed header");
    return v;
  };
  int w = int(next_int());
  int h = int(next_int());
  long maxval = next_int();
  require(w > 0 && h > 0 && maxval > 0 && maxval < 65536,
          "load_pnm: bad header values");
  in.get();  // single whitespace before the raster

  int bytes = maxval > 255 ? 2 : 1;
  std::vector<uint8_t> raster(size_t(w) * h * nch * bytes);
  in.read(reinterpret_cast<char*>(raster.data()), std::streamsize(raster.size()));
  require(in.gcount() == std::streamsize(raster.size()),
          "load_pnm: truncated raster");

  LoadedImage out;
  out.channels.assign(nch, Image(w, h));
  for (size_t i = 0; i < size_t(w) * h; ++i) {
    for (int c = 0; c < nch; ++c) {
      size_t off = (i * nch + c) * bytes;
      double v = bytes == 2 ? (raster[off] << 8 | raster[off + 1])
                            : raster[off];
      out.channels[c].data[i] = float(v / maxval);
    }
  }
  return out;
}

}  // namespace detail

/// Loads PFM, PGM/PPM or PNG by magic bytes; values normalized to [0, 1]
/// except PFM, which is passed through.
inline LoadedImage load_image(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  require(probe.good(), "load_image: cannot open " + path);
  char magic[8] = {};
  probe.read(magic, 8);
  probe.close();

  if (magic[0] == 'P' && (magic[1] == 'f' || magic[1] == 'F')) {
    PfmData pfm = read_pfm(path);
    LoadedImage out;
    if (pfm.channels == 1) {
      out.channels.push_back(pfm_to_image(pfm));
    } else {
      out.channels.assign(3, Image(pfm.width, pfm.height));
      for (size_t i = 0; i < out.channels[0].size(); ++i)
        for (int c = 0; c < 3; ++c)
          out.channels[c].data[i] = pfm.data[i * 3 + c];
    }
    return out;
  }
  if (magic[0] == 'P' && (magic[1] == '5' || magic[1] == '6'))
    return detail::load_pnm(path);
  const unsigned char png_sig[4] = {0x89, 'P', 'N', 'G'};
  if (std::memcmp(magic, png_sig, 4) == 0) return detail::load_png(path);
  throw InputError("load_image: unrecognized format: " + path);
}

inline Image load_image_gray(const std::string& path) {
  LoadedImage li = load_image(path);
  if (li.channels.size() == 3)
    return to_grayscale(li.channels[0], li.channels[1], li.channels[2]);
  return li.channels[0];
}

/// 8-bit RGB PNG writer (interleaved buffer, top-down rows).
inline void save_png_rgb(const std::string& path,
                         const std::vector<uint8_t>& rgb, int width,
                         int height) {
  require(rgb.size() == size_t(width) * height * 3, "save_png_rgb: bad buffer");
  detail::FileCloser fc;
  fc.f = std::fopen(path.c_str(), "wb");
  require(fc.f != nullptr, "save_png_rgb: cannot open " + path);

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  require(png != nullptr, "save_png_rgb: png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw InputError("save_png_rgb: png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw InputError("save_png_rgb: failed to encode " + path);
  }
  png_init_io(png, fc.f);
  png_set_IHDR(png, info, png_uint_32(width), png_uint_32(height), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < height; ++y)
    png_write_row(png, const_cast<png_bytep>(rgb.data() + size_t(y) * width * 3));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace cca
