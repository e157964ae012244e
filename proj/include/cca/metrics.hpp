#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include "cca/disparity.hpp"
#include "cca/image.hpp"

namespace cca {

enum class FitNorm { kL1, kL2 };

struct AffineFit {
  double gain = 0.0;
  double bias = 0.0;
  bool degenerate = false;
};

namespace detail {

// est/gt value pairs with inclusion weights; shared by the metric routines.
struct Samples {
  std::vector<double> est, gt, weight;
};

inline Samples gather_samples(const DisparityMap& est, const DisparityMap& gt,
                              const Image* gt_conf) {
  require(est.same_size(gt), "metrics: dimension mismatch");
  if (gt_conf)
    require(gt_conf->width == gt.width && gt_conf->height == gt.height,
            "metrics: confidence dimension mismatch");
  Samples s;
  for (size_t i = 0; i < est.size(); ++i) {
    if (!est.valid[i] || !gt.valid[i]) continue;
    if (gt_conf && gt_conf->data[i] <= 0.5f) continue;  // binarized inclusion
    s.est.push_back(est.values[i]);
    s.gt.push_back(gt.values[i]);
    s.weight.push_back(1.0);
  }
  return s;
}

inline AffineFit weighted_l2_fit(const std::vector<double>& e,
                                 const std::vector<double>& g,
                                 const std::vector<double>& w) {
  double sw = 0, se = 0, sg = 0, see = 0, seg = 0;
  for (size_t i = 0; i < e.size(); ++i) {
    sw += w[i];
    se += w[i] * e[i];
    sg += w[i] * g[i];
    see += w[i] * e[i] * e[i];
    seg += w[i] * e[i] * g[i];
  }
  AffineFit f;
  double var = see - se * se / sw;
  if (!(sw > 0) || var <= 1e-12 * std::max(1.0, see)) {
    f.degenerate = true;
    f.gain = 0.0;
    f.bias = sw > 0 ? sg / sw : 0.0;
    return f;
  }
  f.gain = (seg - se * sg / sw) / var;
  f.bias = (sg - f.gain * se) / sw;
  return f;
}

}  // namespace detail

/// Fits gt ~ gain * est + bias. L2 is closed-form weighted least squares;
/// L1 runs 20 IRLS iterations with weights 1/max(|residual|, 1e-6) from the
/// L2 initialization. Constant est degenerates to (0, weighted mean of gt).
inline AffineFit affine_fit(const std::vector<double>& est,
                            const std::vector<double>& gt,
                            const std::vector<double>& weight, FitNorm norm) {
  require(est.size() == gt.size() && est.size() == weight.size(),
          "affine_fit: size mismatch");
  require(est.size() >= 2, "affine_fit: need at least two samples");
  AffineFit f = detail::weighted_l2_fit(est, gt, weight);
  if (norm == FitNorm::kL1 && !f.degenerate) {
    std::vector<double> w(est.size());
    for (int iter = 0; iter < 20; ++iter) {
      for (size_t i = 0; i < est.size(); ++i) {
        double r = f.gain * est[i] + f.bias - gt[i];
        w[i] = weight[i] / std::max(std::abs(r), 1e-6);
      }
      AffineFit next = detail::weighted_l2_fit(est, gt, w);
      if (next.degenerate) break;
      f = next;
    }
  }
  return f;
}

inline AffineFit affine_fit(const DisparityMap& est, const DisparityMap& gt,
                            const Image* gt_conf, FitNorm norm) {
  detail::Samples s = detail::gather_samples(est, gt, gt_conf);
  return affine_fit(s.est, s.gt, s.weight, norm);
}

/// Affine-invariant error of order 1 (mean |residual|, L1 fit) or 2
/// (root-mean-square residual, L2 fit), computed against ground truth
/// normalized to [0, 1] before fitting.
inline double ai_metric(const DisparityMap& est, const DisparityMap& gt,
                        const Image* gt_conf, int order) {
  require(order == 1 || order == 2, "ai_metric: order must be 1 or 2");
  detail::Samples s = detail::gather_samples(est, gt, gt_conf);
  require(!s.est.empty(), "ai_metric: empty valid overlap");

  double lo = *std::min_element(s.gt.begin(), s.gt.end());
  double hi = *std::max_element(s.gt.begin(), s.gt.end());
  double span = hi - lo;
  if (span > 0)
    for (double& g : s.gt) g = (g - lo) / span;
  else
    for (double& g : s.gt) g = 0.0;

  AffineFit f =
      affine_fit(s.est, s.gt, s.weight, order == 1 ? FitNorm::kL1 : FitNorm::kL2);
  double acc = 0.0, wsum = 0.0;
  for (size_t i = 0; i < s.est.size(); ++i) {
    double r = f.gain * s.est[i] + f.bias - s.gt[i];
    acc += s.weight[i] * (order == 1 ? std::abs(r) : r * r);
    wsum += s.weight[i];
  }
  double m = acc / wsum;
  return order == 1 ? m : std::sqrt(m);
}

namespace detail {

inline std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](size_t a, size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  size_t i = 0;
  while (i < idx.size()) {
    size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    double r = 0.5 * (i + j) + 1.0;  // average rank, 1-based
    for (size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace detail

/// 1 - |Spearman rank correlation| over the valid overlap, average ranks for
/// ties. Constant inputs have no defined correlation and score worst (1).
inline double spearman_distance(const DisparityMap& est,
                                const DisparityMap& gt, const Image* gt_conf) {
  detail::Samples s = detail::gather_samples(est, gt, gt_conf);
  require(s.est.size() >= 3, "spearman: need at least three valid pixels");
  std::vector<double> re = detail::average_ranks(s.est);
  std::vector<double> rg = detail::average_ranks(s.gt);
  double n = double(re.size());
  double me = 0, mg = 0;
  for (size_t i = 0; i < re.size(); ++i) {
    me += re[i];
    mg += rg[i];
  }
  me /= n;
  mg /= n;
  double cov = 0, ve = 0, vg = 0;
  for (size_t i = 0; i < re.size(); ++i) {
    cov += (re[i] - me) * (rg[i] - mg);
    ve += (re[i] - me) * (re[i] - me);
    vg += (rg[i] - mg) * (rg[i] - mg);
  }
  if (ve <= 0 || vg <= 0) return 1.0;
  double rho = cov / std::sqrt(ve * vg);
  return 1.0 - std::abs(rho);
}

struct StereoMetrics {
  std::map<double, double> bad_px;  // threshold -> percentage
  double rmse = 0.0;
};

/// Bad-pixel percentages at 0.5/1/2 px and RMSE over the mask. Invalid
/// estimate pixels count as bad at every threshold and are excluded from the
/// RMSE.
inline StereoMetrics stereo_metrics(const DisparityMap& est,
                                    const DisparityMap& gt,
                                    const std::vector<uint8_t>& mask) {
  require(est.same_size(gt), "stereo_metrics: dimension mismatch");
  require(mask.size() == est.size(), "stereo_metrics: mask size mismatch");
  const double thresholds[3] = {0.5, 1.0, 2.0};
  long n = 0, bad[3] = {0, 0, 0};
  double se = 0.0;
  long valid_n = 0;
  for (size_t i = 0; i < est.size(); ++i) {
    if (!mask[i] || !gt.valid[i]) continue;
    ++n;
    if (!est.valid[i]) {
      for (long& b : bad) ++b;
      continue;
    }
    double err = std::abs(double(est.values[i]) - gt.values[i]);
    for (int t = 0; t < 3; ++t)
      if (err > thresholds[t]) ++bad[t];
    se += err * err;
    ++valid_n;
  }
  require(n > 0, "stereo_metrics: empty evaluation mask");
  StereoMetrics m;
  for (int t = 0; t < 3; ++t)
    m.bad_px[thresholds[t]] = 100.0 * double(bad[t]) / double(n);
  m.rmse = valid_n > 0 ? std::sqrt(se / double(valid_n)) : 0.0;
  return m;
}

struct MetricReport {
  double ai1 = 0.0;
  double ai2 = 0.0;
  double one_minus_abs_spearman = 0.0;
  double geometric_mean = 0.0;
  std::map<double, double> bad_px;
  double rmse = 0.0;
};

inline MetricReport evaluate_dp(const DisparityMap& est, const DisparityMap& gt,
                                const Image* gt_conf) {
  MetricReport r;
  r.ai1 = ai_metric(est, gt, gt_conf, 1);
  r.ai2 = ai_metric(est, gt, gt_conf, 2);
  r.one_minus_abs_spearman = spearman_distance(est, gt, gt_conf);
  r.geometric_mean =
      std::cbrt(r.ai1 * r.ai2 * r.one_minus_abs_spearman);
  return r;
}

}  // namespace cca
