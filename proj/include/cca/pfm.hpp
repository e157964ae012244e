#pragma once

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "cca/disparity.hpp"
#include "cca/image.hpp"

namespace cca {

// Portable float map, grayscale "Pf". Written little-endian (scale -1.0),
// rows bottom to top per the format convention. Invalid disparities are NaN.

namespace detail {

inline bool host_is_little_endian() {
  uint16_t probe = 1;
  uint8_t byte;
  std::memcpy(&byte, &probe, 1);
  return byte == 1;
}

inline void swap_floats(std::vector<float>& v) {
  for (float& f : v) {
    uint32_t u;
    std::memcpy(&u, &f, 4);
    u = __builtin_bswap32(u);
    std::memcpy(&f, &u, 4);
  }
}

}  // namespace detail

inline void write_pfm(const std::string& path, const float* data, int width,
                      int height) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "write_pfm: cannot open " + path);
  out << "Pf\n" << width << " " << height << "\n-1.0\n";
  std::vector<float> row(width);
  for (int y = height - 1; y >= 0; --y) {
    std::memcpy(row.data(), data + size_t(y) * width, size_t(width) * 4);
    if (!detail::host_is_little_endian()) detail::swap_floats(row);
    out.write(reinterpret_cast<const char*>(row.data()), std::streamsize(width) * 4);
  }
  require(out.good(), "write_pfm: write failed for " + path);
}

inline void write_pfm(const std::string& path, const Image& img) {
  write_pfm(path, img.data.data(), img.width, img.height);
}

inline void write_pfm(const std::string& path, const DisparityMap& disp) {
  std::vector<float> buf(disp.values);
  for (size_t i = 0; i < buf.size(); ++i)
    if (!disp.valid[i]) buf[i] = std::numeric_limits<float>::quiet_NaN();
  write_pfm(path, buf.data(), disp.width, disp.height);
}

struct PfmData {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<float> data;  // top-down, row-major, interleaved channels
};

inline PfmData read_pfm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "read_pfm: cannot open " + path);
  std::string magic;
  in >> magic;
  require(magic == "Pf" || magic == "PF", "read_pfm: not a PFM file: " + path);
  PfmData pfm;
  pfm.channels = (magic == "PF") ? 3 : 1;
  double scale;
  in >> pfm.width >> pfm.height >> scale;
  require(pfm.width > 0 && pfm.height > 0, "read_pfm: bad dimensions");
  in.get();  // single whitespace after the header
  size_t row_elems = size_t(pfm.width) * pfm.channels;
  pfm.data.resize(row_elems * pfm.height);
  std::vector<float> row(row_elems);
  bool file_little = scale < 0;
  for (int y = pfm.height - 1; y >= 0; --y) {
    in.read(reinterpret_cast<char*>(row.data()), std::streamsize(row_elems) * 4);
    require(in.good(), "read_pfm: truncated data in " + path);
    if (file_little != detail::host_is_little_endian()) detail::swap_floats(row);
    std::memcpy(pfm.data.data() + size_t(y) * row_elems, row.data(),
                row_elems * 4);
  }
  return pfm;
}

inline Image pfm_to_image(const PfmData& pfm) {
  Image img(pfm.width, pfm.height);
  if (pfm.channels == 1) {
    img.data = pfm.data;
  } else {
    for (size_t i = 0; i < img.size(); ++i) {
      const float* px = pfm.data.data() + i * pfm.channels;
      img.data[i] = 0.299f * px[0] + 0.587f * px[1] + 0.114f * px[2];
    }
  }
  return img;
}

inline DisparityMap pfm_to_disparity(const PfmData& pfm) {
  require(pfm.channels == 1, "pfm_to_disparity: expected grayscale PFM");
  DisparityMap d(pfm.width, pfm.height);
  for (size_t i = 0; i < d.size(); ++i) {
    float v = pfm.data[i];
    if (std::isfinite(v)) {
      d.values[i] = v;
    } else {
      d.values[i] = 0.0f;
      d.invalidate_at(i);
    }
  }
  return d;
}

inline DisparityMap read_pfm_disparity(const std::string& path) {
  return pfm_to_disparity(read_pfm(path));
}

}  // namespace cca
