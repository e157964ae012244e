#pragma once

#include <cstdint>
#include <vector>

#include "cca/errors.hpp"

namespace cca {

/// Continuous per-pixel disparity with a validity mask and a binary
/// confidence channel. confidence is 0 wherever valid is 0; median filling
/// may mark a pixel valid again while leaving its confidence at 0.
struct DisparityMap {
  int width = 0;
  int height = 0;
  std::vector<float> values;
  std::vector<uint8_t> valid;
  std::vector<float> confidence;

  DisparityMap() = default;
  DisparityMap(int w, int h)
      : width(w), height(h), values(size_t(w) * h, 0.0f),
        valid(size_t(w) * h, 1), confidence(size_t(w) * h, 1.0f) {
    require(w >= 1 && h >= 1, "disparity map dimensions must be >= 1");
  }

  float& operator()(int x, int y) { return values[size_t(y) * width + x]; }
  float operator()(int x, int y) const {
    return values[size_t(y) * width + x];
  }
  bool is_valid(int x, int y) const { return valid[size_t(y) * width + x] != 0; }

  void invalidate_at(size_t i) {
    valid[i] = 0;
    confidence[i] = 0.0f;
  }

  size_t size() const { return values.size(); }
  bool same_size(const DisparityMap& o) const {
    return width == o.width && height == o.height;
  }
};

}  // namespace cca
