#pragma once

#include <cmath>
#include <vector>

#include "cca/disparity.hpp"
#include "cca/image.hpp"
#include "cca/parabola.hpp"

namespace cca {

/// Smoothness and large-disparity regime parameters. The edge sigma and the
/// guide intensities it is compared against live on the 0..255 scale;
/// intensity_scale converts unit-range guides before the exponential.
struct PenaltyParams {
  double p = 1.0;        // smoothness weight P (doubles as P1)
  double sigma = 3.0;    // edge std, 0..255 intensity scale
  double p2 = 0.05;      // large-disparity penalty, p2 < p
  double t_prop = 1000.0;
  double t_edge = 0.5;
  double t_d = 0.1;
  double intensity_scale = 255.0;
};

/// P * A_prev * exp(-(i_p - i_prev)^2 / sigma^2). Strictly positive for
/// A_prev > 0; vanishes across strong edges.
inline double adaptive_penalty(double p, double a_prev, double i_p,
                               double i_prev, double sigma) {
  double di = i_p - i_prev;
  return p * a_prev * std::exp(-(di * di) / (sigma * sigma));
}

struct CoeffPair {
  double a = 0.0;
  double b = 0.0;
};

/// One aggregation step along a path: minimizing
/// alpha*d^2 + beta*d + p_adapt*(d - m_prev)^2 with m_prev = -B_prev/(2A_prev)
/// stays quadratic with these coefficients.
inline CoeffPair step(double alpha, double beta, double a_prev, double b_prev,
                      double p_adapt) {
  return {alpha + p_adapt, beta + p_adapt * (b_prev / a_prev)};
}

/// Two-regime step for wide-baseline ranges. d_local is the pixel's local
/// minimizer already rounded for the case test. Iteration 1 either steps,
/// copies a confident predecessor across a non-edge, or keeps the local
/// coefficients; later iterations always step, with the reduced penalty p2
/// once the local minimizer strays >= 2 px from the path minimizer.
inline CoeffPair step_large_disparity(double alpha, double beta, double a_prev,
                                      double b_prev, double d_local,
                                      double m_prev, double i_p, double i_prev,
                                      const PenaltyParams& pp, int iteration) {
  double di = i_p - i_prev;
  double edge = std::exp(-(di * di) / (pp.sigma * pp.sigma));
  bool near = std::abs(d_local - m_prev) < 2.0;
  if (iteration <= 1) {
    if (near) return step(alpha, beta, a_prev, b_prev, pp.p * a_prev * edge);
    // Edge strength 1-edge must stay below t_edge for propagation.
    if (a_prev / alpha > pp.t_prop && (1.0 - edge) < pp.t_edge)
      return {a_prev, b_prev};
    return {alpha, beta};
  }
  double p_adapt = (near ? pp.p : pp.p2) * edge;
  return step(alpha, beta, a_prev, b_prev, p_adapt);
}

/// eps^2 when any non-first minimum at disparity distance > 2 lies within
/// t_d of the best cost; 1 otherwise.
inline double reduce_confidence_large(const MinimaList::Entry* entries,
                                      int count, double t_d, double eps) {
  for (int i = 1; i < count; ++i) {
    if (std::abs(entries[i].d - entries[0].d) > 2 &&
        entries[i].cost - entries[0].cost < t_d)
      return eps * eps;
  }
  return 1.0;
}

inline void apply_large_disparity_confidence(ParabolaMap& pm,
                                             const MinimaList& minima,
                                             double t_d, double eps) {
  require(pm.width == minima.width && pm.height == minima.height,
          "large-disparity confidence: dimension mismatch");
  for (int y = 0; y < pm.height; ++y) {
    for (int x = 0; x < pm.width; ++x) {
      double s = reduce_confidence_large(minima.at(x, y),
                                         minima.count_at(x, y), t_d, eps);
      if (s != 1.0) {
        size_t i = size_t(y) * pm.width + x;
        pm.alpha[i] *= s;
        pm.beta[i] *= s;
        if (pm.has_gamma()) pm.gamma[i] *= s;
      }
    }
  }
}

struct PathDir {
  int dx = 0;
  int dy = 0;
};

/// 2 = horizontal, 4 = axis-aligned, 8 = axes + diagonals.
inline std::vector<PathDir> path_set(int num_paths) {
  switch (num_paths) {
    case 2:
      return {{1, 0}, {-1, 0}};
    case 4:
      return {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    case 8:
      return {{1, 0}, {-1, 0}, {0, 1}, {0, -1},
              {1, 1}, {-1, -1}, {1, -1}, {-1, 1}};
    default:
      throw InputError("path_set: path count must be 2, 4 or 8");
  }
}

/// Per-pixel sums of path-aggregated coefficients. Doubles bound drift over
/// long paths and many iterations.
struct AggregationState {
  int width = 0;
  int height = 0;
  std::vector<double> sum_a, sum_b;
  std::vector<double> sum_g;

  AggregationState() = default;
  AggregationState(int w, int h, bool track_gamma = false)
      : width(w), height(h), sum_a(size_t(w) * h, 0.0),
        sum_b(size_t(w) * h, 0.0) {
    if (track_gamma) sum_g.assign(size_t(w) * h, 0.0);
  }
  bool has_gamma() const { return !sum_g.empty(); }
};

struct AggregateOptions {
  int num_paths = 8;
  std::vector<PathDir> dirs;  // when non-empty, overrides num_paths
  bool large_disparity = false;
  int iteration = 1;
};

/// Runs the coefficient recurrence along every straight path of the chosen
/// directions and accumulates (A, B) per pixel. The first pixel of each path
/// carries its local coefficients with no penalty.
inline AggregationState aggregate(const ParabolaMap& pm, const Image& guide,
                                  const PenaltyParams& pp,
                                  const AggregateOptions& opt = {}) {
  require(pm.width == guide.width && pm.height == guide.height,
          "aggregate: parabola map and guide dimensions differ");
  const int w = pm.width, h = pm.height;
  std::vector<PathDir> dirs = opt.dirs.empty() ? path_set(opt.num_paths)
                                               : opt.dirs;

  std::vector<double> local_min;
  if (opt.large_disparity) {
    local_min.resize(pm.size());
    for (size_t i = 0; i < pm.size(); ++i)
      local_min[i] = double(std::lround(-pm.beta[i] / (2.0 * pm.alpha[i])));
  }

  AggregationState st(w, h, pm.has_gamma());

  // With p > 1 the running coefficients grow geometrically along smooth
  // stretches; rescaling the (A, B) pair jointly keeps doubles in range
  // without moving any minimizer.
  constexpr double kRescaleAt = 1e30;

  auto run_path = [&](int x, int y, int dx, int dy) {
    double a_prev = 0.0, b_prev = 0.0, g_prev = 0.0;
    double i_prev = 0.0;
    bool first = true;
    while (x >= 0 && x < w && y >= 0 && y < h) {
      size_t i = size_t(y) * w + x;
      double i_cur = double(guide(x, y)) * pp.intensity_scale;
      if (!first && a_prev > kRescaleAt) {
        double c = kRescaleAt / a_prev;
        a_prev *= c;
        b_prev *= c;
        g_prev *= c;
      }
      double a, b, g = 0.0;
      if (first) {
        a = pm.alpha[i];
        b = pm.beta[i];
        if (st.has_gamma()) g = pm.gamma[i];
        first = false;
      } else if (opt.large_disparity) {
        double m_prev = -b_prev / (2.0 * a_prev);
        CoeffPair r = step_large_disparity(pm.alpha[i], pm.beta[i], a_prev,
                                           b_prev, local_min[i], m_prev,
                                           i_cur, i_prev, pp, opt.iteration);
        a = r.a;
        b = r.b;
        if (st.has_gamma()) g = pm.gamma[i];  // not propagated in this regime
      } else {
        double p_adapt =
            adaptive_penalty(pp.p, a_prev, i_cur, i_prev, pp.sigma);
        CoeffPair r = step(pm.alpha[i], pm.beta[i], a_prev, b_prev, p_adapt);
        a = r.a;
        b = r.b;
        if (st.has_gamma()) {
          double m_prev = -b_prev / (2.0 * a_prev);
          g = pm.gamma[i] + p_adapt * m_prev * m_prev;
        }
      }
      st.sum_a[i] += a;
      st.sum_b[i] += b;
      if (st.has_gamma()) st.sum_g[i] += g;
      a_prev = a;
      b_prev = b;
      g_prev = g;
      i_prev = i_cur;
      x += dx;
      y += dy;
    }
    (void)g_prev;
  };

  for (const PathDir& dir : dirs) {
    require(dir.dx != 0 || dir.dy != 0, "aggregate: null path direction");
    // Start pixels are those whose predecessor lies outside the image.
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        int px = x - dir.dx, py = y - dir.dy;
        if (px < 0 || px >= w || py < 0 || py >= h) run_path(x, y, dir.dx, dir.dy);
      }
    }
  }
  return st;
}

/// Closed-form minimizer of the summed parabola: -sum(B) / (2 sum(A)).
inline DisparityMap extract_disparity(const AggregationState& st) {
  DisparityMap out(st.width, st.height);
  for (size_t i = 0; i < st.sum_a.size(); ++i) {
    if (!(st.sum_a[i] > 0.0))
      throw InternalError("extract_disparity: non-positive aggregated curvature");
    out.values[i] = float(-st.sum_b[i] / (2.0 * st.sum_a[i]));
  }
  return out;
}

/// Coefficients for the next iteration: N * (sum_a, sum_b) with
/// N = alpha1 / mean(alpha1), keeping first-iteration confidence ratios while
/// undoing the curvature growth of aggregation. Callers re-apply invalidate()
/// afterwards.
inline ParabolaMap renormalize_iteration(const AggregationState& st,
                                         const ParabolaMap& first_locals) {
  require(st.width == first_locals.width && st.height == first_locals.height,
          "renormalize_iteration: dimension mismatch");
  double mean = 0.0;
  for (double a : first_locals.alpha) mean += a;
  mean /= double(first_locals.alpha.size());
  require(mean > 0.0, "renormalize_iteration: mean first-iteration alpha is 0");

  ParabolaMap out(st.width, st.height, first_locals.has_gamma() && st.has_gamma());
  for (size_t i = 0; i < out.size(); ++i) {
    double n = first_locals.alpha[i] / mean;
    out.alpha[i] = n * st.sum_a[i];
    out.beta[i] = n * st.sum_b[i];
    if (out.has_gamma()) out.gamma[i] = n * st.sum_g[i];
  }
  return out;
}

}  // namespace cca
