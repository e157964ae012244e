#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "cca/errors.hpp"

namespace cca {

/// Single-channel row-major raster. Intensities are dimensionless, nominally
/// in [0, 1].
struct Image {
  int width = 0;
  int height = 0;
  std::vector<float> data;

  Image() = default;
  Image(int w, int h, float fill = 0.0f)
      : width(w), height(h), data(size_t(w) * size_t(h), fill) {
    require(w >= 1 && h >= 1, "image dimensions must be >= 1");
  }

  float& operator()(int x, int y) { return data[size_t(y) * width + x]; }
  float operator()(int x, int y) const { return data[size_t(y) * width + x]; }

  // Edge-replicated access.
  float at_clamped(int x, int y) const {
    x = std::clamp(x, 0, width - 1);
    y = std::clamp(y, 0, height - 1);
    return (*this)(x, y);
  }

  bool same_size(const Image& o) const {
    return width == o.width && height == o.height;
  }
  size_t size() const { return data.size(); }
};

/// Bilinear sample at a real-valued position, replicating edges.
inline float bilinear_sample(const Image& img, double x, double y) {
  int x0 = int(std::floor(x));
  int y0 = int(std::floor(y));
  double fx = x - x0;
  double fy = y - y0;
  double v00 = img.at_clamped(x0, y0);
  double v10 = img.at_clamped(x0 + 1, y0);
  double v01 = img.at_clamped(x0, y0 + 1);
  double v11 = img.at_clamped(x0 + 1, y0 + 1);
  double top = v00 + fx * (v10 - v00);
  double bot = v01 + fx * (v11 - v01);
  return float(top + fy * (bot - top));
}

/// BT.601 luma. Pass-through overload below covers already-gray input.
inline Image to_grayscale(const Image& r, const Image& g, const Image& b) {
  require(r.same_size(g) && r.same_size(b),
          "to_grayscale: channel dimensions differ");
  Image out(r.width, r.height);
  for (size_t i = 0; i < out.size(); ++i)
    out.data[i] = 0.299f * r.data[i] + 0.587f * g.data[i] + 0.114f * b.data[i];
  return out;
}

inline Image to_grayscale(const Image& gray) { return gray; }

/// 1-D Gaussian taps at integer offsets [-r, r], r = ceil(3*std), sum 1.
inline std::vector<double> gaussian_kernel(double std_dev) {
  require(std_dev > 0.0, "gaussian kernel: std must be positive");
  int radius = int(std::ceil(3.0 * std_dev));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    double w = std::exp(-0.5 * double(i) * double(i) / (std_dev * std_dev));
    k[i + radius] = w;
    sum += w;
  }
  for (double& w : k) w /= sum;
  return k;
}

/// Separable Gaussian convolution with edge replication.
inline Image gaussian_window_filter(const Image& img, double std_dev) {
  std::vector<double> k = gaussian_kernel(std_dev);
  int radius = int(k.size() / 2);

  Image tmp(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i)
        acc += k[i + radius] * img.at_clamped(x + i, y);
      tmp(x, y) = float(acc);
    }
  }
  Image out(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i)
        acc += k[i + radius] * tmp.at_clamped(x, y + i);
      out(x, y) = float(acc);
    }
  }
  return out;
}

/// Fine-to-coarse image stack; level k+1 has ceil(level k / factor) pixels
/// per axis.
struct Pyramid {
  std::vector<Image> levels;
  double factor = 2.0;
};

// Low-pass (std = 0.5*factor) then resample on the coarse grid; coarse pixel
// centers map to (X + 0.5)*factor - 0.5 in fine coordinates.
inline Image downsample(const Image& img, double factor) {
  Image filtered = gaussian_window_filter(img, 0.5 * factor);
  int tw = int(std::ceil(img.width / factor));
  int th = int(std::ceil(img.height / factor));
  Image out(tw, th);
  for (int y = 0; y < th; ++y)
    for (int x = 0; x < tw; ++x)
      out(x, y) = bilinear_sample(filtered, (x + 0.5) * factor - 0.5,
                                  (y + 0.5) * factor - 0.5);
  return out;
}

inline Pyramid build_pyramid(const Image& img, int num_levels, double factor) {
  require(num_levels >= 1, "build_pyramid: need at least one level");
  require(factor > 1.0, "build_pyramid: factor must exceed 1");
  Pyramid pyr;
  pyr.factor = factor;
  pyr.levels.push_back(img);
  for (int k = 1; k < num_levels; ++k) {
    const Image& prev = pyr.levels.back();
    int tw = int(std::ceil(prev.width / factor));
    int th = int(std::ceil(prev.height / factor));
    if (tw < 8 || th < 8)
      throw InputError("build_pyramid: image too small for requested levels");
    pyr.levels.push_back(downsample(prev, factor));
  }
  return pyr;
}

template <typename T>
inline std::vector<T> bilinear_upsample_buffer(const std::vector<T>& src,
                                               int sw, int sh, int tw,
                                               int th) {
  std::vector<T> out(size_t(tw) * th);
  double rx = double(sw) / tw;
  double ry = double(sh) / th;
  for (int y = 0; y < th; ++y) {
    double sy = (y + 0.5) * ry - 0.5;
    int y0 = std::clamp(int(std::floor(sy)), 0, sh - 1);
    int y1 = std::min(y0 + 1, sh - 1);
    double fy = std::clamp(sy - y0, 0.0, 1.0);
    for (int x = 0; x < tw; ++x) {
      double sx = (x + 0.5) * rx - 0.5;
      int x0 = std::clamp(int(std::floor(sx)), 0, sw - 1);
      int x1 = std::min(x0 + 1, sw - 1);
      double fx = std::clamp(sx - x0, 0.0, 1.0);
      double v00 = src[size_t(y0) * sw + x0];
      double v10 = src[size_t(y0) * sw + x1];
      double v01 = src[size_t(y1) * sw + x0];
      double v11 = src[size_t(y1) * sw + x1];
      double top = v00 + fx * (v10 - v00);
      double bot = v01 + fx * (v11 - v01);
      out[size_t(y) * tw + x] = T(top + fy * (bot - top));
    }
  }
  return out;
}

/// Bilinear upsampling, align-corners-false convention.
inline Image bilinear_upsample(const Image& img, int target_w, int target_h) {
  require(target_w >= img.width && target_h >= img.height,
          "bilinear_upsample: target must not be smaller than source");
  Image out(target_w, target_h);
  out.data = bilinear_upsample_buffer(img.data, img.width, img.height,
                                      target_w, target_h);
  return out;
}

/// Shading calibration of the left view against the right:
/// left * LPF(right) / LPF(left), with the denominator clamped to 1e-4.
inline Image vignetting_compensate(const Image& left, const Image& right,
                                   double lpf_std) {
  require(left.same_size(right), "vignetting_compensate: dimension mismatch");
  Image lp_l = gaussian_window_filter(left, lpf_std);
  Image lp_r = gaussian_window_filter(right, lpf_std);
  Image out(left.width, left.height);
  for (size_t i = 0; i < out.size(); ++i) {
    float denom = std::max(lp_l.data[i], 1e-4f);
    out.data[i] = left.data[i] * (lp_r.data[i] / denom);
  }
  return out;
}

/// High-pass residual: img minus its joint spatial/range bilateral smoothing.
/// Removes low-frequency photometric mismatch while keeping local texture.
inline Image subtraction_bilateral(const Image& img, double spatial_std,
                                   double range_std) {
  require(spatial_std > 0.0 && range_std > 0.0,
          "subtraction_bilateral: stds must be positive");
  int radius = int(std::ceil(3.0 * spatial_std));
  std::vector<double> spatial(size_t(2 * radius + 1) * (2 * radius + 1));
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx)
      spatial[size_t(dy + radius) * (2 * radius + 1) + (dx + radius)] =
          std::exp(-0.5 * (dx * dx + dy * dy) / (spatial_std * spatial_std));

  double inv_2r2 = 0.5 / (range_std * range_std);
  Image out(img.width, img.height);
  // accumulating differences from the center keeps the constant-image
  // residual exactly zero
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      double center = img(x, y);
      double wsum = 0.0, dsum = 0.0;
      for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
          double dv = img.at_clamped(x + dx, y + dy) - center;
          double w =
              spatial[size_t(dy + radius) * (2 * radius + 1) + (dx + radius)] *
              std::exp(-dv * dv * inv_2r2);
          wsum += w;
          dsum += w * dv;
        }
      }
      out(x, y) = float(-dsum / wsum);
    }
  }
  return out;
}

}  // namespace cca
