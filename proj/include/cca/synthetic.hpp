#pragma once

#include <cmath>
#include <limits>

#include "cca/disparity.hpp"
#include "cca/image.hpp"
#include "cca/random.hpp"

namespace cca {

/// Band-limited random texture in [0, 1]: smoothed white noise, contrast
/// stretched.
inline Image make_textured_noise(int w, int h, uint64_t seed,
                                 double smooth_std = 1.5) {
  Rng rng(seed);
  Image noise(w, h);
  for (float& v : noise.data) v = float(rng.uniform());
  Image tex = gaussian_window_filter(noise, smooth_std);
  float lo = tex.data[0], hi = tex.data[0];
  for (float v : tex.data) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  float span = std::max(hi - lo, 1e-6f);
  for (float& v : tex.data) v = (v - lo) / span;
  return tex;
}

/// Smooth random field in [-amplitude, amplitude], for shift and blur maps.
inline Image make_smooth_field(int w, int h, uint64_t seed, double amplitude,
                               double smooth_std = 12.0) {
  Image f = make_textured_noise(w, h, seed, smooth_std);
  Image out(w, h);
  for (size_t i = 0; i < f.size(); ++i)
    out.data[i] = float((f.data[i] * 2.0 - 1.0) * amplitude);
  return out;
}

// Gaussian blur with a per-pixel std; stds below 0.3 px copy through.
inline Image variable_blur(const Image& img, const Image& std_map) {
  require(img.same_size(std_map), "variable_blur: dimension mismatch");
  Image out(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      double s = std::abs(std_map(x, y));
      if (s < 0.3) {
        out(x, y) = img(x, y);
        continue;
      }
      int radius = int(std::ceil(3.0 * s));
      double wsum = 0.0, vsum = 0.0;
      for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
          double wgt = std::exp(-0.5 * (dx * dx + dy * dy) / (s * s));
          wsum += wgt;
          vsum += wgt * img.at_clamped(x + dx, y + dy);
        }
      }
      out(x, y) = float(vsum / wsum);
    }
  }
  return out;
}

struct SyntheticPair {
  Image left, right;
  DisparityMap gt;
};

/// Degradations applied on top of the warped pair. A contrast floor below 1
/// modulates the texture with a smooth envelope (weakly textured patches);
/// noise_std adds independent sensor noise to both views after blurring.
/// An albedo map (left-view coordinates) multiplies the texture before
/// warping, putting intensity edges where the caller puts them.
struct SyntheticOptions {
  double contrast_floor = 1.0;
  double noise_std = 0.0;
  double texture_smooth = 1.5;
  const Image* albedo = nullptr;
};

/// Deterministic stereo pair: a random texture and its fractionally resampled
/// copy, right(x) = left(x + shift(x)), so the ground-truth disparity equals
/// the shift field. An optional per-pixel blur std imitates defocus on both
/// views. Shifts outside [range_lo, range_hi] are rejected.
inline SyntheticPair generate_synthetic_pair(
    int width, int height, const Image& shift, const Image* blur_std,
    uint64_t seed,
    double range_lo = -std::numeric_limits<double>::infinity(),
    double range_hi = std::numeric_limits<double>::infinity(),
    const SyntheticOptions& opt = {}) {
  require(shift.width == width && shift.height == height,
          "generate_synthetic_pair: shift field dimension mismatch");
  for (float s : shift.data)
    require(s >= range_lo && s <= range_hi,
            "generate_synthetic_pair: shift exceeds the disparity range");

  SyntheticPair pair;
  pair.left = make_textured_noise(width, height, seed, opt.texture_smooth);
  if (opt.contrast_floor < 1.0) {
    Image env = make_textured_noise(width, height, seed + 0x9e3779b9, 9.0);
    for (size_t i = 0; i < pair.left.size(); ++i) {
      double c = opt.contrast_floor + (1.0 - opt.contrast_floor) * env.data[i];
      pair.left.data[i] = float(0.5 + (pair.left.data[i] - 0.5) * c);
    }
  }
  if (opt.albedo) {
    require(opt.albedo->width == width && opt.albedo->height == height,
            "generate_synthetic_pair: albedo dimension mismatch");
    for (size_t i = 0; i < pair.left.size(); ++i)
      pair.left.data[i] = std::clamp(pair.left.data[i] * opt.albedo->data[i],
                                     0.0f, 1.0f);
  }
  pair.right = Image(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      pair.right(x, y) = bilinear_sample(pair.left, x + shift(x, y), y);

  if (blur_std) {
    pair.left = variable_blur(pair.left, *blur_std);
    pair.right = variable_blur(pair.right, *blur_std);
  }
  if (opt.noise_std > 0.0) {
    Rng noise(seed + 0x51ed2701);
    for (float& v : pair.left.data)
      v = float(std::clamp(v + opt.noise_std * noise.normal(), 0.0, 1.0));
    for (float& v : pair.right.data)
      v = float(std::clamp(v + opt.noise_std * noise.normal(), 0.0, 1.0));
  }

  pair.gt = DisparityMap(width, height);
  for (size_t i = 0; i < shift.size(); ++i) pair.gt.values[i] = shift.data[i];
  return pair;
}

inline SyntheticPair generate_synthetic_pair(
    int width, int height, double constant_shift, uint64_t seed,
    double range_lo = -std::numeric_limits<double>::infinity(),
    double range_hi = std::numeric_limits<double>::infinity()) {
  Image shift(width, height, float(constant_shift));
  return generate_synthetic_pair(width, height, shift, nullptr, seed, range_lo,
                                 range_hi);
}

}  // namespace cca
