#pragma once

#include <cmath>
#include <vector>

#include "cca/aggregate.hpp"
#include "cca/config.hpp"
#include "cca/image.hpp"

namespace cca {

/// Coarse-level aggregated coefficients brought to a finer resolution.
/// B is pre-multiplied by the scale factor so the implied minimizer scales
/// with resolution: -(B*F)/(2A) = F * m.
struct ScalePrior {
  int width = 0;
  int height = 0;
  std::vector<double> a_prior, b_prior;
  double weight = 0.0;
};

inline ScalePrior upsample_prior(const std::vector<double>& a_coarse,
                                 const std::vector<double>& b_coarse,
                                 int coarse_w, int coarse_h, double factor,
                                 int target_w, int target_h, double weight) {
  require(factor > 1.0, "upsample_prior: factor must exceed 1");
  require(a_coarse.size() == size_t(coarse_w) * coarse_h &&
              b_coarse.size() == a_coarse.size(),
          "upsample_prior: coefficient map dimensions differ");
  ScalePrior prior;
  prior.width = target_w;
  prior.height = target_h;
  prior.weight = weight;
  std::vector<double> b_scaled(b_coarse.size());
  for (size_t i = 0; i < b_coarse.size(); ++i) b_scaled[i] = b_coarse[i] * factor;
  prior.a_prior = bilinear_upsample_buffer(a_coarse, coarse_w, coarse_h,
                                           target_w, target_h);
  prior.b_prior = bilinear_upsample_buffer(b_scaled, coarse_w, coarse_h,
                                           target_w, target_h);
  return prior;
}

/// Scalar form: the fused minimizer is the confidence-weighted blend of the
/// local and prior minimizers.
inline CoeffPair fuse_prior(double alpha, double beta, double a_prior,
                            double b_prior, double weight) {
  return {alpha + weight * a_prior, beta + weight * b_prior};
}

inline void fuse_prior(ParabolaMap& pm, const ScalePrior& prior) {
  require(pm.width == prior.width && pm.height == prior.height,
          "fuse_prior: dimension mismatch");
  for (size_t i = 0; i < pm.size(); ++i) {
    pm.alpha[i] += prior.weight * prior.a_prior[i];
    pm.beta[i] += prior.weight * prior.b_prior[i];
  }
}

struct DisparityRange {
  int d_min = 0;
  int d_max = 0;
};

/// Integer search range for the finer scale: the coarse range scaled by F
/// with a one-disparity margin on each side, clamped to the absolute range,
/// then widened if fewer than three planes survive the clamp.
inline DisparityRange range_from_prior(const DisparityMap& coarse,
                                       double factor,
                                       DisparityRange absolute) {
  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (size_t i = 0; i < coarse.size(); ++i) {
    if (!coarse.valid[i]) continue;
    double v = coarse.values[i];
    if (!any) {
      lo = hi = v;
      any = true;
    } else {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  require(any, "range_from_prior: no valid coarse disparities");

  DisparityRange r;
  r.d_min = int(std::floor(factor * lo)) - 1;
  r.d_max = int(std::ceil(factor * hi)) + 1;
  r.d_min = std::max(r.d_min, absolute.d_min);
  r.d_max = std::min(r.d_max, absolute.d_max);
  if (r.d_min > r.d_max) r = absolute;
  while (r.d_max - r.d_min + 1 < 3) {
    if (r.d_min > absolute.d_min) --r.d_min;
    else ++r.d_max;
  }
  return r;
}

namespace detail {

inline DisparityRange absolute_range_at_level(const Config& cfg, int level) {
  double f = std::pow(2.0, level);
  DisparityRange r;
  r.d_min = int(std::floor(cfg.d_min / f));
  r.d_max = int(std::ceil(cfg.d_max / f));
  while (r.d_max - r.d_min + 1 < 3) {
    --r.d_min;
    ++r.d_max;
  }
  return r;
}

}  // namespace detail

struct LevelOutput {
  AggregationState state;
  double mean_alpha1 = 0.0;  // image mean of the first-iteration locals
};

/// Single-level CCA: cost volume -> parabola field -> iterated aggregation.
/// Exposed separately so single-scale behaviour can be checked against the
/// multi-scale driver.
inline LevelOutput run_level(const Image& left, const Image& right,
                             const Config& cfg, DisparityRange range,
                             const ScalePrior* prior) {
  CostVolume cv = compute_cost(left, right, cfg.metric, cfg.window_std,
                               range.d_min, range.d_max);
  bool large = cfg.mode == Mode::kStereoLarge;
  MinimaList minima = find_minima(cv, large ? 5 : 2);

  ParabolaInitOptions opt;
  opt.t_q = cfg.t_q;
  opt.eps = cfg.epsilon;
  opt.subpixel.kind = cfg.subpixel;
  opt.subpixel.calibrated_offset = cfg.subpixel_offset;
  ParabolaMap pm = init_parabolas(cv, minima, opt);
  if (large) apply_large_disparity_confidence(pm, minima, cfg.t_d, cfg.epsilon);
  pm = invalidate(std::move(pm), cfg.t_a, cfg.epsilon);
  if (prior) fuse_prior(pm, *prior);

  const ParabolaMap first_locals = pm;
  PenaltyParams pp = cfg.penalty_params();
  LevelOutput out;
  int iters = cfg.iterations.empty() ? 1 : cfg.iterations.front();
  for (int it = 1; it <= iters; ++it) {
    AggregateOptions ao;
    ao.num_paths = cfg.num_paths;
    ao.large_disparity = large;
    ao.iteration = it;
    out.state = aggregate(pm, left, pp, ao);
    if (it < iters)
      pm = invalidate(renormalize_iteration(out.state, first_locals), cfg.t_a,
                      cfg.epsilon);
  }
  for (double a : first_locals.alpha) out.mean_alpha1 += a;
  out.mean_alpha1 /= double(first_locals.alpha.size());
  return out;
}

/// Coarse-to-fine driver: per scale, runs the level pipeline, then carries
/// the aggregated coefficients to the next finer scale as a weighted prior
/// and restricts its disparity search range.
inline DisparityMap run_coarse_to_fine(const Image& left, const Image& right,
                                       const Config& cfg) {
  require(left.same_size(right), "run_coarse_to_fine: dimension mismatch");
  validate_config(cfg);
  const int scales = cfg.num_scales;
  Pyramid pl = build_pyramid(left, scales, 2.0);
  Pyramid pr = build_pyramid(right, scales, 2.0);

  DisparityMap disp;
  ScalePrior prior;
  bool have_prior = false;

  for (int s = scales - 1; s >= 0; --s) {
    const Image& lv = pl.levels[s];
    const Image& rv = pr.levels[s];
    DisparityRange abs_range = detail::absolute_range_at_level(cfg, s);
    DisparityRange range = abs_range;
    if (have_prior) range = range_from_prior(disp, 2.0, abs_range);

    Config level_cfg = cfg;
    level_cfg.iterations = {cfg.iterations[s]};
    level_cfg.num_scales = 1;
    LevelOutput lvl =
        run_level(lv, rv, level_cfg, range, have_prior ? &prior : nullptr);
    disp = extract_disparity(lvl.state);

    if (s > 0) {
      // Aggregation inflates the coefficients by orders of magnitude; bring
      // the carried pair back to the scale of the local fits so the fusion
      // weight keeps its meaning. A uniform factor moves no minimizer.
      double mean_sum = 0.0;
      for (double a : lvl.state.sum_a) mean_sum += a;
      mean_sum /= double(lvl.state.sum_a.size());
      double rescale = mean_sum > 0.0 ? lvl.mean_alpha1 / mean_sum : 1.0;
      std::vector<double> a_carry(lvl.state.sum_a), b_carry(lvl.state.sum_b);
      for (double& v : a_carry) v *= rescale;
      for (double& v : b_carry) v *= rescale;

      const Image& finer = pl.levels[s - 1];
      prior = upsample_prior(a_carry, b_carry, lv.width, lv.height, 2.0,
                             finer.width, finer.height, cfg.prior_weight);
      have_prior = true;
    }
  }
  return disp;
}

}  // namespace cca
