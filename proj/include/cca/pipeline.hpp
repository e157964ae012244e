#pragma once

#include "cca/config.hpp"
#include "cca/multiscale.hpp"
#include "cca/refine.hpp"
#include "cca/sgm.hpp"

namespace cca {

/// Pre-processing for one reference view: shading calibration against the
/// other view, then the high-pass bilateral residual. Both are toggled by
/// config; DSLR-quality inputs typically skip both.
inline Image preprocess_view(const Image& ref, const Image& other,
                             const Config& cfg) {
  Image out = ref;
  if (cfg.pre_vignetting)
    out = vignetting_compensate(out, other, cfg.vignetting_lpf_std);
  if (cfg.pre_subtract_bilateral)
    out = subtraction_bilateral(out, cfg.sb_spatial_std, cfg.sb_range_std);
  return out;
}

inline Config reverse_view_config(const Config& cfg) {
  Config rev = cfg;
  rev.d_min = -cfg.d_max;
  rev.d_max = -cfg.d_min;
  return rev;
}

/// Shared post-processing chain: left-right check, speckle removal, the
/// binary confidence map from what survives, median filling of the holes,
/// then edge-aware smoothing against the guide.
inline DisparityMap postprocess(DisparityMap disp, const DisparityMap* disp_r,
                                const Image& guide, const Config& cfg) {
  if (disp_r) disp = lr_consistency(disp, *disp_r, cfg.lr_tolerance);
  disp = speckle_filter(disp, cfg.speckle_max_region, cfg.speckle_tol);
  for (size_t i = 0; i < disp.size(); ++i)
    disp.confidence[i] = disp.valid[i] ? 1.0f : 0.0f;
  disp = median_fill(disp, cfg.median_radius);
  if (cfg.filter_kind == FilterKind::kBilateral) {
    disp = edge_aware_smooth(disp, guide, cfg.sigma_luma, cfg.sigma_xy,
                             cfg.smooth_lambda, cfg.intensity_scale);
  } else {
    disp = guided_smooth(disp, guide, cfg.guided_radius, cfg.guided_eps);
  }
  return disp;
}

/// Full CCA pipeline on grayscale inputs. With post_filter enabled, the
/// right-view disparity is computed by swapping the pair and negating the
/// range, and the filter chain runs with the left view as guide.
inline DisparityMap run_cca(const Image& left, const Image& right,
                            const Config& cfg) {
  Image lp = preprocess_view(left, right, cfg);
  Image rp = preprocess_view(right, left, cfg);
  DisparityMap disp = run_coarse_to_fine(lp, rp, cfg);
  if (!cfg.post_filter) return disp;

  Config rev = reverse_view_config(cfg);
  DisparityMap disp_r = run_coarse_to_fine(rp, lp, rev);
  return postprocess(std::move(disp), &disp_r, left, cfg);
}

/// SGM baseline sharing the cost function, guide-based penalty attenuation
/// and post-processing chain with CCA.
inline DisparityMap run_sgm(const Image& left, const Image& right,
                            const Config& cfg) {
  Image lp = preprocess_view(left, right, cfg);
  Image rp = preprocess_view(right, left, cfg);

  SgmParams params;
  params.p1 = cfg.sgm_p1;
  params.p2 = cfg.sgm_p2;
  params.num_paths = cfg.num_paths;
  params.guide_sigma = cfg.edge_sigma;
  params.intensity_scale = cfg.intensity_scale;

  auto one_view = [&](const Image& a, const Image& b, double lo, double hi) {
    int d_min = int(std::floor(lo));
    int d_max = int(std::ceil(hi));
    while (d_max - d_min + 1 < 3) {
      --d_min;
      ++d_max;
    }
    CostVolume cv =
        compute_cost(a, b, cfg.metric, cfg.window_std, d_min, d_max);
    return wta_subpixel(sgm_aggregate(cv, params, a));
  };

  DisparityMap disp = one_view(lp, rp, cfg.d_min, cfg.d_max);
  if (!cfg.post_filter) return disp;

  DisparityMap disp_r = one_view(rp, lp, -cfg.d_max, -cfg.d_min);
  return postprocess(std::move(disp), &disp_r, left, cfg);
}

}  // namespace cca
