#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

#include "cca/disparity.hpp"

namespace cca {

// Viridis anchors (matplotlib), interpolated linearly.
inline std::array<uint8_t, 3> viridis(double t) {
  static const uint8_t anchors[17][3] = {
      {68, 1, 84},    {71, 24, 106},  {72, 46, 124},  {69, 67, 135},
      {63, 87, 140},  {56, 106, 142}, {49, 123, 142}, {43, 140, 141},
      {38, 156, 137}, {39, 172, 130}, {53, 188, 116}, {81, 202, 97},
      {116, 214, 72}, {157, 223, 45}, {200, 229, 30}, {240, 231, 38},
      {253, 231, 37}};
  t = std::clamp(t, 0.0, 1.0);
  double pos = t * 16.0;
  int i0 = std::min(int(pos), 15);
  double f = pos - i0;
  std::array<uint8_t, 3> rgb;
  for (int c = 0; c < 3; ++c)
    rgb[c] = uint8_t(anchors[i0][c] + f * (anchors[i0 + 1][c] - anchors[i0][c]) + 0.5);
  return rgb;
}

struct ColorizedDisparity {
  std::vector<uint8_t> rgb;  // interleaved, top-down
  float min_value = 0.0f;
  float max_value = 0.0f;
};

/// Linear map of valid disparities onto viridis; invalid pixels are black.
inline ColorizedDisparity colorize_disparity(const DisparityMap& disp) {
  ColorizedDisparity out;
  out.rgb.assign(disp.size() * 3, 0);
  bool any = false;
  for (size_t i = 0; i < disp.size(); ++i) {
    if (!disp.valid[i]) continue;
    float v = disp.values[i];
    if (!any) {
      out.min_value = out.max_value = v;
      any = true;
    } else {
      out.min_value = std::min(out.min_value, v);
      out.max_value = std::max(out.max_value, v);
    }
  }
  double span = any ? std::max(double(out.max_value) - out.min_value, 1e-12)
                    : 1.0;
  for (size_t i = 0; i < disp.size(); ++i) {
    if (!disp.valid[i]) continue;
    auto rgb = viridis((disp.values[i] - out.min_value) / span);
    out.rgb[i * 3] = rgb[0];
    out.rgb[i * 3 + 1] = rgb[1];
    out.rgb[i * 3 + 2] = rgb[2];
  }
  return out;
}

}  // namespace cca
