#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "cca/image.hpp"

namespace cca {

enum class CostMetric { kSad, kSsd, kNcc };

/// Discrete matching cost over an inclusive signed disparity range.
/// Plane-major storage: plane d is contiguous width*height floats.
struct CostVolume {
  int width = 0;
  int height = 0;
  int d_min = 0;
  int d_max = 0;
  std::vector<float> costs;

  CostVolume() = default;
  CostVolume(int w, int h, int dmin, int dmax)
      : width(w), height(h), d_min(dmin), d_max(dmax),
        costs(size_t(w) * h * size_t(dmax - dmin + 1), 0.0f) {
    require(dmin <= dmax, "cost volume: empty disparity range");
  }

  int num_planes() const { return d_max - d_min + 1; }

  size_t index(int x, int y, int d) const {
    return (size_t(d - d_min) * height + y) * width + x;
  }
  float& at(int x, int y, int d) { return costs[index(x, y, d)]; }
  float at(int x, int y, int d) const { return costs[index(x, y, d)]; }

  float* plane(int d) { return costs.data() + size_t(d - d_min) * height * width; }
  const float* plane(int d) const {
    return costs.data() + size_t(d - d_min) * height * width;
  }
};

/// right sampled at x - d with edge replication.
inline Image shift_image(const Image& img, int d) {
  Image out(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      out(x, y) = img.at_clamped(x - d, y);
  return out;
}

/// Gaussian-weighted window cost, computed shift-then-filter so each plane is
/// one aggregation pass. NCC is mapped to a cost as 1 - NCC, clamped to
/// [0, 2]; windows with (near-)zero variance on either side get NCC = 0.
inline CostVolume compute_cost(const Image& left, const Image& right,
                               CostMetric metric, double window_std, int d_min,
                               int d_max) {
  require(left.same_size(right), "compute_cost: dimension mismatch");
  require(d_max - d_min + 1 >= 3,
          "compute_cost: need at least three disparity planes");
  require(window_std > 0.0, "compute_cost: window std must be positive");

  CostVolume cv(left.width, left.height, d_min, d_max);
  const size_t n = left.size();

  Image mu_l, mu_ll;
  if (metric == CostMetric::kNcc) {
    mu_l = gaussian_window_filter(left, window_std);
    Image ll(left.width, left.height);
    for (size_t i = 0; i < n; ++i) ll.data[i] = left.data[i] * left.data[i];
    mu_ll = gaussian_window_filter(ll, window_std);
  }

  for (int d = d_min; d <= d_max; ++d) {
    Image shifted = shift_image(right, d);
    float* plane = cv.plane(d);
    switch (metric) {
      case CostMetric::kSad: {
        Image diff(left.width, left.height);
        for (size_t i = 0; i < n; ++i)
          diff.data[i] = std::abs(left.data[i] - shifted.data[i]);
        Image filtered = gaussian_window_filter(diff, window_std);
        std::copy(filtered.data.begin(), filtered.data.end(), plane);
        break;
      }
      case CostMetric::kSsd: {
        Image diff(left.width, left.height);
        for (size_t i = 0; i < n; ++i) {
          float e = left.data[i] - shifted.data[i];
          diff.data[i] = e * e;
        }
        Image filtered = gaussian_window_filter(diff, window_std);
        std::copy(filtered.data.begin(), filtered.data.end(), plane);
        break;
      }
      case CostMetric::kNcc: {
        Image rr(left.width, left.height), lr(left.width, left.height);
        for (size_t i = 0; i < n; ++i) {
          rr.data[i] = shifted.data[i] * shifted.data[i];
          lr.data[i] = left.data[i] * shifted.data[i];
        }
        Image mu_r = gaussian_window_filter(shifted, window_std);
        Image mu_rr = gaussian_window_filter(rr, window_std);
        Image mu_lr = gaussian_window_filter(lr, window_std);
        for (size_t i = 0; i < n; ++i) {
          double var_l = double(mu_ll.data[i]) - double(mu_l.data[i]) * mu_l.data[i];
          double var_r = double(mu_rr.data[i]) - double(mu_r.data[i]) * mu_r.data[i];
          double cov = double(mu_lr.data[i]) - double(mu_l.data[i]) * mu_r.data[i];
          // threshold sits above float round-off of the filtered products
          double ncc = 0.0;
          if (var_l > 1e-6 && var_r > 1e-6)
            ncc = cov / std::sqrt(var_l * var_r);
          plane[i] = float(std::clamp(1.0 - ncc, 0.0, 2.0));
        }
        break;
      }
    }
  }
  // Filter round-off can leave tiny negatives on SAD/SSD planes.
  for (float& c : cv.costs) c = std::max(c, 0.0f);
  return cv;
}

/// Per pixel: the global cost minimum first, then up to k-1 strict local
/// minima of the 1-D cost curve, ascending by cost, ties toward lower
/// disparity.
struct MinimaList {
  struct Entry {
    int d = 0;
    float cost = 0.0f;
  };

  int width = 0;
  int height = 0;
  int k = 0;
  std::vector<uint8_t> count;
  std::vector<Entry> entries;

  MinimaList() = default;
  MinimaList(int w, int h, int kk)
      : width(w), height(h), k(kk), count(size_t(w) * h, 0),
        entries(size_t(w) * h * kk) {}

  const Entry* at(int x, int y) const {
    return entries.data() + (size_t(y) * width + x) * k;
  }
  Entry* at(int x, int y) { return entries.data() + (size_t(y) * width + x) * k; }
  int count_at(int x, int y) const { return count[size_t(y) * width + x]; }
};

inline MinimaList find_minima(const CostVolume& cv, int k) {
  require(k >= 1, "find_minima: k must be >= 1");
  MinimaList out(cv.width, cv.height, k);
  const int planes = cv.num_planes();
  const size_t stride = size_t(cv.width) * cv.height;

  std::vector<MinimaList::Entry> locals;
  locals.reserve(planes);
  for (int y = 0; y < cv.height; ++y) {
    for (int x = 0; x < cv.width; ++x) {
      const float* base = cv.costs.data() + size_t(y) * cv.width + x;
      int best = 0;
      float best_cost = base[0];
      for (int i = 1; i < planes; ++i) {
        float c = base[size_t(i) * stride];
        if (c < best_cost) {
          best_cost = c;
          best = i;
        }
      }
      MinimaList::Entry* dst = out.at(x, y);
      dst[0] = {cv.d_min + best, best_cost};
      int n = 1;
      if (k > 1) {
        locals.clear();
        for (int i = 1; i + 1 < planes; ++i) {
          if (i == best) continue;
          float c = base[size_t(i) * stride];
          if (c < base[size_t(i - 1) * stride] &&
              c < base[size_t(i + 1) * stride])
            locals.push_back({cv.d_min + i, c});
        }
        std::stable_sort(locals.begin(), locals.end(),
                         [](const MinimaList::Entry& a,
                            const MinimaList::Entry& b) {
                           if (a.cost != b.cost) return a.cost < b.cost;
                           return a.d < b.d;
                         });
        for (const auto& e : locals) {
          if (n >= k) break;
          dst[n++] = e;
        }
      }
      out.count[size_t(y) * cv.width + x] = uint8_t(n);
    }
  }
  return out;
}

}  // namespace cca
