#pragma once

#include <cmath>
#include <vector>

#include "cca/aggregate.hpp"
#include "cca/cost.hpp"
#include "cca/disparity.hpp"

namespace cca {

struct SgmParams {
  double p1 = 0.02;
  double p2 = 0.4;          // p1 <= p2
  int num_paths = 8;
  double guide_sigma = 3.0;  // gradient level above which p2 attenuates,
                             // 0..255 intensity scale
  double intensity_scale = 255.0;
};

/// Classic semi-global recurrence per path:
/// L(p,d) = C(p,d) + min(L(q,d), L(q,d+-1)+P1, min_k L(q,k)+P2) - min_k L(q,k)
/// summed over all paths. P2 is divided by |dI|/sigma where the guide
/// gradient exceeds sigma, never dropping below P1.
inline CostVolume sgm_aggregate(const CostVolume& cv, const SgmParams& params,
                                const Image& guide) {
  require(cv.width == guide.width && cv.height == guide.height,
          "sgm_aggregate: cost volume and guide dimensions differ");
  require(cv.num_planes() >= 2, "sgm_aggregate: need at least two planes");
  require(params.p1 > 0 && params.p2 >= params.p1,
          "sgm_aggregate: penalties must satisfy 0 < p1 <= p2");

  const int w = cv.width, h = cv.height, planes = cv.num_planes();
  CostVolume out(w, h, cv.d_min, cv.d_max);
  std::vector<PathDir> dirs = path_set(params.num_paths);

  std::vector<double> prev(planes), cur(planes);

  auto run_path = [&](int x, int y, int dx, int dy) {
    bool first = true;
    double prev_min = 0.0, i_prev = 0.0;
    while (x >= 0 && x < w && y >= 0 && y < h) {
      double i_cur = double(guide(x, y)) * params.intensity_scale;
      if (first) {
        for (int d = 0; d < planes; ++d)
          cur[d] = cv.costs[(size_t(d) * h + y) * w + x];
        first = false;
      } else {
        double grad = std::abs(i_cur - i_prev);
        double p2 = params.p2;
        if (grad > params.guide_sigma)
          p2 = std::max(params.p1, params.p2 * params.guide_sigma / grad);
        for (int d = 0; d < planes; ++d) {
          double best = prev[d];
          if (d > 0) best = std::min(best, prev[d - 1] + params.p1);
          if (d + 1 < planes) best = std::min(best, prev[d + 1] + params.p1);
          best = std::min(best, prev_min + p2);
          cur[d] = cv.costs[(size_t(d) * h + y) * w + x] + best - prev_min;
        }
      }
      prev_min = cur[0];
      for (int d = 0; d < planes; ++d) {
        out.costs[(size_t(d) * h + y) * w + x] += float(cur[d]);
        prev_min = std::min(prev_min, cur[d]);
      }
      std::swap(prev, cur);
      i_prev = i_cur;
      x += dx;
      y += dy;
    }
  };

  for (const PathDir& dir : dirs) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        int px = x - dir.dx, py = y - dir.dy;
        if (px < 0 || px >= w || py < 0 || py >= h)
          run_path(x, y, dir.dx, dir.dy);
      }
    }
  }
  return out;
}

/// Winner-take-all with parabola refinement: per-pixel argmin (ties toward
/// lower disparity), then the triplet sub-pixel offset for interior argmins.
inline DisparityMap wta_subpixel(const CostVolume& aggregated) {
  const int w = aggregated.width, h = aggregated.height;
  const int planes = aggregated.num_planes();
  const size_t stride = size_t(w) * h;
  DisparityMap out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const float* base = aggregated.costs.data() + size_t(y) * w + x;
      int best = 0;
      float best_cost = base[0];
      for (int d = 1; d < planes; ++d) {
        float c = base[size_t(d) * stride];
        if (c < best_cost) {
          best_cost = c;
          best = d;
        }
      }
      double disp = aggregated.d_min + best;
      if (best > 0 && best + 1 < planes) {
        double cm = base[size_t(best - 1) * stride];
        double cp = base[size_t(best + 1) * stride];
        double denom = cm + cp - 2.0 * double(best_cost);
        if (denom > 1e-12) disp += (cm - cp) / (2.0 * denom);
      }
      out(x, y) = float(disp);
    }
  }
  return out;
}

}  // namespace cca
