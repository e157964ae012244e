#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "cca/disparity.hpp"
#include "cca/image.hpp"

namespace cca {

/// Invalidates pixels whose left and right disparities disagree:
/// |disp_l(p) + disp_r(p + round(disp_l(p)))| > tol, or the warped location
/// falls outside the image or onto an invalid right-view pixel.
inline DisparityMap lr_consistency(const DisparityMap& disp_l,
                                   const DisparityMap& disp_r, double tol) {
  require(disp_l.same_size(disp_r), "lr_consistency: dimension mismatch");
  DisparityMap out = disp_l;
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      size_t i = size_t(y) * out.width + x;
      if (!out.valid[i]) continue;
      double dl = out.values[i];
      int xr = x + int(std::lround(dl));
      if (xr < 0 || xr >= out.width || !disp_r.is_valid(xr, y) ||
          std::abs(dl + disp_r(xr, y)) > tol)
        out.invalidate_at(i);
    }
  }
  return out;
}

/// Removes connected components (4-connectivity, neighbors linked when their
/// disparities differ by <= disp_tol) smaller than max_region pixels.
inline DisparityMap speckle_filter(const DisparityMap& disp, int max_region,
                                   double disp_tol) {
  require(max_region >= 1, "speckle_filter: max_region must be >= 1");
  DisparityMap out = disp;
  const int w = disp.width, h = disp.height;
  std::vector<int32_t> label(disp.size(), -1);
  std::vector<size_t> stack, component;

  int next_label = 0;
  for (size_t start = 0; start < disp.size(); ++start) {
    if (!disp.valid[start] || label[start] >= 0) continue;
    stack.assign(1, start);
    component.clear();
    label[start] = next_label;
    while (!stack.empty()) {
      size_t i = stack.back();
      stack.pop_back();
      component.push_back(i);
      int x = int(i % w), y = int(i / w);
      const int nx[4] = {x - 1, x + 1, x, x};
      const int ny[4] = {y, y, y - 1, y + 1};
      for (int n = 0; n < 4; ++n) {
        if (nx[n] < 0 || nx[n] >= w || ny[n] < 0 || ny[n] >= h) continue;
        size_t j = size_t(ny[n]) * w + nx[n];
        if (!disp.valid[j] || label[j] >= 0) continue;
        if (std::abs(disp.values[i] - disp.values[j]) <= disp_tol) {
          label[j] = next_label;
          stack.push_back(j);
        }
      }
    }
    if (int(component.size()) < max_region)
      for (size_t i : component) out.invalidate_at(i);
    ++next_label;
  }
  return out;
}

/// Fills invalid pixels with the median of valid values in a
/// (2*window+1)^2 neighborhood, sweeping until no pixel changes so the
/// operation is a fixed point of itself. Valid pixels are never altered and
/// filled pixels keep confidence 0.
inline DisparityMap median_fill(const DisparityMap& disp, int window) {
  require(window >= 1, "median_fill: window must be >= 1");
  DisparityMap cur = disp;
  const int w = disp.width, h = disp.height;
  std::vector<float> vals;
  bool changed = true;
  while (changed) {
    changed = false;
    DisparityMap next = cur;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        size_t i = size_t(y) * w + x;
        if (cur.valid[i]) continue;
        vals.clear();
        for (int dy = -window; dy <= window; ++dy) {
          for (int dx = -window; dx <= window; ++dx) {
            int qx = x + dx, qy = y + dy;
            if (qx < 0 || qx >= w || qy < 0 || qy >= h) continue;
            if (cur.is_valid(qx, qy)) vals.push_back(cur(qx, qy));
          }
        }
        if (vals.empty()) continue;
        size_t mid = vals.size() / 2;
        std::nth_element(vals.begin(), vals.begin() + mid, vals.end());
        float med = vals[mid];
        if (vals.size() % 2 == 0) {
          float lower = *std::max_element(vals.begin(), vals.begin() + mid);
          med = 0.5f * (med + lower);
        }
        next.values[i] = med;
        next.valid[i] = 1;
        changed = true;
      }
    }
    cur = std::move(next);
  }
  return cur;
}

/// Confidence-weighted joint bilateral smoothing of the disparity against a
/// guide image. The pass count grows logarithmically with lambda, standing in
/// for a solver smoothness weight. sigma_luma is on the 0..255 scale.
inline DisparityMap edge_aware_smooth(const DisparityMap& disp,
                                      const Image& guide, double sigma_luma,
                                      double sigma_xy, double lambda,
                                      double intensity_scale = 255.0) {
  require(disp.width == guide.width && disp.height == guide.height,
          "edge_aware_smooth: dimension mismatch");
  require(sigma_luma > 0 && sigma_xy > 0, "edge_aware_smooth: stds must be positive");
  int passes = std::max(1, int(std::llround(std::log2(1.0 + lambda))));
  int radius = int(std::ceil(3.0 * sigma_xy));
  const int w = disp.width, h = disp.height;

  std::vector<double> spatial(size_t(2 * radius + 1) * (2 * radius + 1));
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx)
      spatial[size_t(dy + radius) * (2 * radius + 1) + (dx + radius)] =
          std::exp(-0.5 * (dx * dx + dy * dy) / (sigma_xy * sigma_xy));
  double inv_2l2 = 0.5 / (sigma_luma * sigma_luma);

  DisparityMap cur = disp;
  for (int pass = 0; pass < passes; ++pass) {
    DisparityMap next = cur;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double g0 = double(guide(x, y)) * intensity_scale;
        double wsum = 0.0, vsum = 0.0;
        for (int dy = -radius; dy <= radius; ++dy) {
          int qy = y + dy;
          if (qy < 0 || qy >= h) continue;
          for (int dx = -radius; dx <= radius; ++dx) {
            int qx = x + dx;
            if (qx < 0 || qx >= w) continue;
            size_t j = size_t(qy) * w + qx;
            if (!cur.valid[j]) continue;
            double conf = cur.confidence[j];
            if (conf <= 0.0) continue;
            double dg = double(guide(qx, qy)) * intensity_scale - g0;
            double weight =
                spatial[size_t(dy + radius) * (2 * radius + 1) + (dx + radius)] *
                std::exp(-dg * dg * inv_2l2) * conf;
            wsum += weight;
            vsum += weight * cur.values[j];
          }
        }
        size_t i = size_t(y) * w + x;
        if (wsum > 0.0) {
          next.values[i] = float(vsum / wsum);
          next.valid[i] = 1;
        }
        // zero total confidence: the pixel passes through unfiltered
      }
    }
    cur = std::move(next);
  }
  return cur;
}

/// Guided-filter smoothing backend: per-window linear regression of the
/// disparity on the guide with box means, then averaged coefficients.
inline DisparityMap guided_smooth(const DisparityMap& disp, const Image& guide,
                                  int radius, double eps) {
  require(disp.width == guide.width && disp.height == guide.height,
          "guided_smooth: dimension mismatch");
  require(radius >= 1, "guided_smooth: radius must be >= 1");
  const int w = disp.width, h = disp.height;

  auto box = [&](const std::vector<double>& src) {
    // running-sum box filter, edge-truncated window with per-pixel counts
    std::vector<double> tmp(src.size()), out(src.size());
    for (int y = 0; y < h; ++y) {
      double run = 0.0;
      int cnt = 0;
      for (int x = 0; x <= std::min(radius, w - 1); ++x) {
        run += src[size_t(y) * w + x];
        ++cnt;
      }
      for (int x = 0; x < w; ++x) {
        tmp[size_t(y) * w + x] = run / cnt;
        int add = x + radius + 1, del = x - radius;
        if (add < w) { run += src[size_t(y) * w + add]; ++cnt; }
        if (del >= 0) { run -= src[size_t(y) * w + del]; --cnt; }
      }
    }
    for (int x = 0; x < w; ++x) {
      double run = 0.0;
      int cnt = 0;
      for (int y = 0; y <= std::min(radius, h - 1); ++y) {
        run += tmp[size_t(y) * w + x];
        ++cnt;
      }
      for (int y = 0; y < h; ++y) {
        out[size_t(y) * w + x] = run / cnt;
        int add = y + radius + 1, del = y - radius;
        if (add < h) { run += tmp[size_t(add) * w + x]; ++cnt; }
        if (del >= 0) { run -= tmp[size_t(del) * w + x]; --cnt; }
      }
    }
    return out;
  };

  std::vector<double> I(disp.size()), p(disp.size()), Ip(disp.size()),
      II(disp.size());
  for (size_t i = 0; i < disp.size(); ++i) {
    I[i] = guide.data[i];
    p[i] = disp.values[i];
    Ip[i] = I[i] * p[i];
    II[i] = I[i] * I[i];
  }
  std::vector<double> mean_i = box(I), mean_p = box(p), mean_ip = box(Ip),
                      mean_ii = box(II);
  std::vector<double> a(disp.size()), b(disp.size());
  for (size_t i = 0; i < disp.size(); ++i) {
    double var = mean_ii[i] - mean_i[i] * mean_i[i];
    double cov = mean_ip[i] - mean_i[i] * mean_p[i];
    a[i] = cov / (var + eps);
    b[i] = mean_p[i] - a[i] * mean_i[i];
  }
  std::vector<double> mean_a = box(a), mean_b = box(b);
  DisparityMap out = disp;
  for (size_t i = 0; i < disp.size(); ++i)
    out.values[i] = float(mean_a[i] * I[i] + mean_b[i]);
  return out;
}

}  // namespace cca
