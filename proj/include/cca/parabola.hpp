#pragma once

#include <cstdint>
#include <vector>

#include "cca/cost.hpp"
#include "cca/random.hpp"

namespace cca {

/// Quadratic a*dd^2 + b*dd + c in the offset dd from the anchor disparity d0.
struct LocalParabola {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  int d0 = 0;
};

/// The same parabola rewritten in absolute disparity d:
/// alpha*d^2 + beta*d + gamma.
struct GlobalParabola {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

/// Per-pixel quadratic cost coefficients. gamma never affects the minimizer
/// and is tracked only when a caller asks for it (oracle checks).
struct ParabolaMap {
  int width = 0;
  int height = 0;
  std::vector<double> alpha, beta;
  std::vector<double> gamma;
  std::vector<uint8_t> valid;

  ParabolaMap() = default;
  ParabolaMap(int w, int h, bool track_gamma = false)
      : width(w), height(h), alpha(size_t(w) * h, 0.0),
        beta(size_t(w) * h, 0.0), valid(size_t(w) * h, 1) {
    if (track_gamma) gamma.assign(size_t(w) * h, 0.0);
  }

  bool has_gamma() const { return !gamma.empty(); }
  size_t size() const { return alpha.size(); }
};

/// Exact quadratic through the costs at d0-1, d0, d0+1. c_0 must be the
/// triplet minimum, which guarantees a >= 0.
inline LocalParabola fit_local(double c_minus, double c_0, double c_plus,
                               int d0) {
  LocalParabola p;
  p.a = 0.5 * (c_plus + c_minus - 2.0 * c_0);
  p.b = 0.5 * (c_plus - c_minus);
  p.c = c_0;
  p.d0 = d0;
  return p;
}

inline GlobalParabola to_global(const LocalParabola& p) {
  GlobalParabola g;
  g.alpha = p.a;
  g.beta = p.b - 2.0 * p.a * p.d0;
  g.gamma = p.c + p.a * double(p.d0) * p.d0 - p.b * p.d0;
  return g;
}

/// Confidence factor from the two lowest cost minima. With r = second/best
/// (>= 1), S = max(min((r-1)/(t_q-1), 1), eps)^2: distinct minima keep full
/// confidence, near-ties collapse to eps^2. Callers apply this only when the
/// second minimum is not adjacent to the first (|d1 - d0| > 1).
inline double confidence_scale(double best_cost, double second_cost,
                               double t_q, double eps) {
  require(t_q > 1.0, "confidence_scale: ratio threshold must exceed 1");
  double r;
  if (second_cost <= 0.0) {
    r = 1.0;  // both costs zero: maximal ambiguity
  } else if (best_cost <= 0.0) {
    return 1.0;
  } else {
    r = second_cost / best_cost;
  }
  double s = std::max(std::min((r - 1.0) / (t_q - 1.0), 1.0), eps);
  return s * s;
}

/// Pixels with alpha < t_a become the (eps, 0, 0) sentinel so that path
/// aggregation inherits their minimum from the preceding pixels.
inline ParabolaMap invalidate(ParabolaMap map, double t_a, double eps) {
  for (size_t i = 0; i < map.size(); ++i) {
    if (map.alpha[i] < t_a) {
      map.alpha[i] = eps;
      map.beta[i] = 0.0;
      if (map.has_gamma()) map.gamma[i] = 0.0;
      map.valid[i] = 0;
    }
  }
  return map;
}

/// Re-centers the minimizer at d0 + delta, keeping the curvature.
inline LocalParabola recenter(LocalParabola p, double delta) {
  p.b = -2.0 * p.a * delta;
  return p;
}

/// Histogram-equalization style sub-pixel interpolation. With
/// rho = (low neighbor - c0) / (high neighbor - c0) in [0, 1], the offset is
/// sign * 0.5 * (1 - sqrt(rho)); rho = 1 (symmetric) gives 0, rho = 0 gives
/// +/-0.5. The calibrated offset measured by calibrate_histeq_offset is
/// subtracted, and the result clamps to (-0.5, 0.5).
inline double histeq_subpixel(double c_minus, double c_0, double c_plus,
                              double calibrated_offset) {
  double hi = std::max(c_minus, c_plus);
  double lo = std::min(c_minus, c_plus);
  double raw = 0.0;
  if (hi > c_0) {
    double rho = std::clamp((lo - c_0) / (hi - c_0), 0.0, 1.0);
    double mag = 0.5 * (1.0 - std::sqrt(rho));
    raw = (c_plus < c_minus) ? mag : (c_minus < c_plus ? -mag : 0.0);
  }
  return std::clamp(raw - calibrated_offset, -0.4999, 0.4999);
}

/// Measures the mean signed error of the uncalibrated histogram-equalization
/// estimator on a random texture shifted by 0.1..1.0 px. injected_bias is
/// added to every raw estimate, which lets the calibration loop itself be
/// validated against a known bias.
inline double calibrate_histeq_offset(uint64_t seed,
                                      double injected_bias = 0.0) {
  const int w = 96, h = 96;
  Rng rng(seed);
  Image noise(w, h);
  for (float& v : noise.data) v = float(rng.uniform());
  Image tex = gaussian_window_filter(noise, 1.0);

  const double window_std = 1.5;
  const int d_min = -1, d_max = 2;
  const int margin = int(std::ceil(3.0 * window_std)) + 2;

  double err_sum = 0.0;
  long err_n = 0;
  for (int step = 1; step <= 10; ++step) {
    double shift = 0.1 * step;
    Image right(w, h);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        right(x, y) = bilinear_sample(tex, x + shift, y);

    CostVolume cv = compute_cost(tex, right, CostMetric::kSad, window_std,
                                 d_min, d_max);
    for (int y = margin; y < h - margin; ++y) {
      for (int x = margin; x < w - margin; ++x) {
        int best = d_min;
        float best_cost = cv.at(x, y, d_min);
        for (int d = d_min + 1; d <= d_max; ++d) {
          if (cv.at(x, y, d) < best_cost) {
            best_cost = cv.at(x, y, d);
            best = d;
          }
        }
        if (best == d_min || best == d_max) continue;
        double delta = histeq_subpixel(cv.at(x, y, best - 1), best_cost,
                                       cv.at(x, y, best + 1), 0.0) +
                       injected_bias;
        err_sum += (best + delta) - shift;
        ++err_n;
      }
    }
  }
  return err_n > 0 ? err_sum / err_n : 0.0;
}

enum class SubpixelKind { kParabola, kHistEq };

/// Pluggable initial sub-pixel estimator seam; the parabola variant keeps
/// the fitted minimizer as-is.
struct SubpixelEstimator {
  SubpixelKind kind = SubpixelKind::kParabola;
  double calibrated_offset = 0.0;
};

struct ParabolaInitOptions {
  double t_q = 2.2;
  double eps = 1e-4;
  SubpixelEstimator subpixel;
  bool track_gamma = false;
};

/// Builds the per-pixel global parabola field: triplet fit around the best
/// integer disparity, optional re-centering, then Eq.-style confidence
/// scaling against the second minimum. Pixels whose best disparity sits on
/// the range boundary get a flat (0, 0, 0) fit, which the caller's
/// invalidate() pass turns into the sentinel.
inline ParabolaMap init_parabolas(const CostVolume& cv,
                                  const MinimaList& minima,
                                  const ParabolaInitOptions& opt) {
  require(cv.width == minima.width && cv.height == minima.height,
          "init_parabolas: dimension mismatch");
  ParabolaMap pm(cv.width, cv.height, opt.track_gamma);
  for (int y = 0; y < cv.height; ++y) {
    for (int x = 0; x < cv.width; ++x) {
      const MinimaList::Entry* m = minima.at(x, y);
      int d0 = m[0].d;
      if (d0 == cv.d_min || d0 == cv.d_max) {
        size_t i = size_t(y) * cv.width + x;
        pm.alpha[i] = 0.0;  // no curvature information at the boundary
        pm.beta[i] = 0.0;
        continue;
      }
      double cm = cv.at(x, y, d0 - 1);
      double c0 = cv.at(x, y, d0);
      double cp = cv.at(x, y, d0 + 1);
      LocalParabola local = fit_local(cm, c0, cp, d0);
      if (opt.subpixel.kind == SubpixelKind::kHistEq) {
        double delta =
            histeq_subpixel(cm, c0, cp, opt.subpixel.calibrated_offset);
        local = recenter(local, delta);
      }
      double scale = 1.0;
      if (minima.count_at(x, y) > 1 && std::abs(m[1].d - d0) > 1)
        scale = confidence_scale(m[0].cost, m[1].cost, opt.t_q, opt.eps);
      GlobalParabola g = to_global(local);
      size_t i = size_t(y) * cv.width + x;
      pm.alpha[i] = scale * g.alpha;
      pm.beta[i] = scale * g.beta;
      if (opt.track_gamma) pm.gamma[i] = scale * g.gamma;
    }
  }
  return pm;
}

}  // namespace cca
