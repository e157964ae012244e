#include "cca/metrics.hpp"

#include "test_util.hpp"

using namespace cca;

namespace {

DisparityMap map_from(const std::vector<float>& v, int w, int h) {
  DisparityMap d(w, h);
  d.values = v;
  return d;
}

// brute-force affine fit by nested parameter scan, refined twice
AffineFit grid_fit(const std::vector<double>& e, const std::vector<double>& g,
                   FitNorm norm) {
  double best_gain = 0, best_bias = 0, best_err = 1e300;
  double gc = 0, bc = 0, span = 16.0;
  for (int refine = 0; refine < 4; ++refine) {
    for (int i = -40; i <= 40; ++i) {
      for (int j = -40; j <= 40; ++j) {
        double gain = gc + span * i / 40.0;
        double bias = bc + span * j / 40.0;
        double err = 0;
        for (size_t k = 0; k < e.size(); ++k) {
          double r = gain * e[k] + bias - g[k];
          err += norm == FitNorm::kL1 ? std::abs(r) : r * r;
        }
        if (err < best_err) {
          best_err = err;
          best_gain = gain;
          best_bias = bias;
        }
      }
    }
    gc = best_gain;
    bc = best_bias;
    span /= 20.0;
  }
  return {best_gain, best_bias, false};
}

}  // namespace

TEST_CASE("affine fitting", "[metrics]") {
  SECTION("identity when est equals gt") {
    std::vector<double> e = {0, 1, 2, 3, 4}, w(5, 1.0);
    AffineFit f = affine_fit(e, e, w, FitNorm::kL2);
    REQUIRE(f.gain == Catch::Approx(1.0));
    REQUIRE(f.bias == Catch::Approx(0.0).margin(1e-12));
  }
  SECTION("exact affine relation is recovered by both norms") {
    std::vector<double> e = {0, 1, 2, 3, 4}, g(5), w(5, 1.0);
    for (size_t i = 0; i < e.size(); ++i) g[i] = 3.0 * e[i] - 2.0;
    for (FitNorm n : {FitNorm::kL1, FitNorm::kL2}) {
      AffineFit f = affine_fit(e, g, w, n);
      REQUIRE(f.gain == Catch::Approx(3.0).margin(1e-6));
      REQUIRE(f.bias == Catch::Approx(-2.0).margin(1e-6));
    }
  }
  SECTION("L1 rejects the outlier that pulls L2") {
    auto l1_objective = [](const std::vector<double>& e,
                           const std::vector<double>& g, const AffineFit& f) {
      double err = 0;
      for (size_t i = 0; i < e.size(); ++i)
        err += std::abs(f.gain * e[i] + f.bias - g[i]);
      return err;
    };
    {
      // on this 4-point set the L1 optimum is a flat valley (objective 7 for
      // any gain in [1, 10/3] at zero bias); check the objective value, not
      // one argmin
      std::vector<double> e = {0, 1, 2, 3}, g = {0, 1, 2, 10}, w(4, 1.0);
      AffineFit l1 = affine_fit(e, g, w, FitNorm::kL1);
      AffineFit l1_ref = grid_fit(e, g, FitNorm::kL1);
      REQUIRE(l1_objective(e, g, l1) ==
              Catch::Approx(l1_objective(e, g, l1_ref)).margin(0.02));
      AffineFit l2 = affine_fit(e, g, w, FitNorm::kL2);
      AffineFit l2_ref = grid_fit(e, g, FitNorm::kL2);
      REQUIRE(l2.gain == Catch::Approx(l2_ref.gain).margin(0.02));
      REQUIRE(l2.bias == Catch::Approx(l2_ref.bias).margin(0.02));
      REQUIRE(l2.gain > 1.5);  // pulled toward the outlier
    }
    {
      // with one more inlier the L1 optimum is the inlier line
      std::vector<double> e = {0, 1, 2, 3, 4}, g = {0, 1, 2, 3, 12}, w(5, 1.0);
      AffineFit l1 = affine_fit(e, g, w, FitNorm::kL1);
      AffineFit l1_ref = grid_fit(e, g, FitNorm::kL1);
      REQUIRE(l1.gain == Catch::Approx(1.0).margin(0.05));
      REQUIRE(std::abs(l1.bias) < 0.05);
      REQUIRE(l1_ref.gain == Catch::Approx(1.0).margin(0.05));
      AffineFit l2 = affine_fit(e, g, w, FitNorm::kL2);
      REQUIRE(l2.gain > 1.5);
    }
  }
  SECTION("constant estimate degenerates to the weighted mean") {
    std::vector<double> e(6, 2.0), g = {1, 2, 3, 4, 5, 6}, w(6, 1.0);
    AffineFit f = affine_fit(e, g, w, FitNorm::kL2);
    REQUIRE(f.degenerate);
    REQUIRE(f.gain == 0.0);
    REQUIRE(f.bias == Catch::Approx(3.5));
  }
}

TEST_CASE("affine-invariant error", "[metrics]") {
  SECTION("affine estimates score zero") {
    DisparityMap gt = map_from({0.0f, 0.5f, 1.0f, 1.5f, 2.0f, 2.5f}, 3, 2);
    DisparityMap est(3, 2);
    for (size_t i = 0; i < est.size(); ++i)
      est.values[i] = -2.0f * gt.values[i] + 0.7f;
    // float storage bounds how exactly the affine relation survives
    REQUIRE(ai_metric(est, gt, nullptr, 1) == Catch::Approx(0.0).margin(1e-6));
    REQUIRE(ai_metric(est, gt, nullptr, 2) == Catch::Approx(0.0).margin(1e-6));
  }
  SECTION("uniform noise on the normalized scale gives mean |U| = 0.025") {
    const int w = 120, h = 120;
    Rng rng(101);
    DisparityMap gt(w, h), est(w, h);
    for (size_t i = 0; i < gt.size(); ++i) {
      gt.values[i] = float(rng.uniform(0.0, 1.0));
      est.values[i] = float(gt.values[i] + rng.uniform(-0.05, 0.05));
    }
    // the gt already spans ~[0,1]; the [0,1] normalization keeps residual
    // amplitudes, so AI(1) is close to E|U(-0.05, 0.05)| = 0.025
    REQUIRE(ai_metric(est, gt, nullptr, 1) ==
            Catch::Approx(0.025).margin(0.005));
  }
  SECTION("invariant under affine remapping of the estimate") {
    Rng rng(102);
    DisparityMap gt(10, 10), est(10, 10);
    for (size_t i = 0; i < gt.size(); ++i) {
      gt.values[i] = float(rng.uniform(-2.0, 2.0));
      est.values[i] = float(gt.values[i] + rng.uniform(-0.3, 0.3));
    }
    double base1 = ai_metric(est, gt, nullptr, 1);
    double base2 = ai_metric(est, gt, nullptr, 2);
    for (int trial = 0; trial < 100; ++trial) {
      double a = rng.uniform(0.05, 5.0);
      double b = rng.uniform(-10.0, 10.0);
      DisparityMap scaled = est;
      for (float& v : scaled.values) v = float(a * v + b);
      REQUIRE(ai_metric(scaled, gt, nullptr, 1) ==
              Catch::Approx(base1).margin(1e-6));
      REQUIRE(ai_metric(scaled, gt, nullptr, 2) ==
              Catch::Approx(base2).margin(1e-6));
    }
    // negative gain: AI(2) identical, AI(1) within the IRLS tolerance
    DisparityMap negated = est;
    for (float& v : negated.values) v = -3.0f * v + 1.0f;
    REQUIRE(ai_metric(negated, gt, nullptr, 2) ==
            Catch::Approx(base2).margin(1e-6));
    REQUIRE(ai_metric(negated, gt, nullptr, 1) ==
            Catch::Approx(base1).margin(1e-6));
  }
}

TEST_CASE("spearman distance", "[metrics]") {
  SECTION("monotone agreement scores zero") {
    DisparityMap gt = map_from({0, 1, 2, 3, 4, 5}, 6, 1);
    DisparityMap est(6, 1);
    for (size_t i = 0; i < est.size(); ++i)
      est.values[i] = std::exp(gt.values[i]);  // monotone transform
    REQUIRE(spearman_distance(est, gt, nullptr) ==
            Catch::Approx(0.0).margin(1e-12));
  }
  SECTION("sign flips are absorbed by the absolute value") {
    DisparityMap gt = map_from({0, 1, 2, 3, 4, 5}, 6, 1);
    DisparityMap est(6, 1);
    for (size_t i = 0; i < est.size(); ++i) est.values[i] = -gt.values[i];
    REQUIRE(spearman_distance(est, gt, nullptr) ==
            Catch::Approx(0.0).margin(1e-12));
  }
  SECTION("hand-computed rank correlation") {
    DisparityMap est = map_from({1, 2, 3, 4}, 4, 1);
    DisparityMap gt = map_from({1, 2, 4, 3}, 4, 1);
    REQUIRE(spearman_distance(est, gt, nullptr) ==
            Catch::Approx(0.2).margin(1e-12));
  }
  SECTION("constant input scores worst") {
    DisparityMap est = map_from({2, 2, 2, 2}, 4, 1);
    DisparityMap gt = map_from({1, 2, 3, 4}, 4, 1);
    REQUIRE(spearman_distance(est, gt, nullptr) == 1.0);
  }
  SECTION("invariant under strictly monotone transforms") {
    Rng rng(103);
    DisparityMap gt(8, 8), est(8, 8);
    for (size_t i = 0; i < gt.size(); ++i) {
      gt.values[i] = float(rng.uniform(-1.0, 1.0));
      est.values[i] = float(rng.uniform(-1.0, 1.0));
    }
    double base = spearman_distance(est, gt, nullptr);
    DisparityMap cubed = est;
    for (float& v : cubed.values) v = v * v * v + v;
    REQUIRE(spearman_distance(cubed, gt, nullptr) ==
            Catch::Approx(base).margin(1e-9));
    DisparityMap scaled = est;
    for (float& v : scaled.values) v = 0.1f * v - 40.0f;
    REQUIRE(spearman_distance(scaled, gt, nullptr) ==
            Catch::Approx(base).margin(1e-9));
  }
}

TEST_CASE("stereo metrics", "[metrics]") {
  SECTION("exact estimate scores zero everywhere") {
    DisparityMap gt = map_from({1, 2, 3, 4, 5, 6}, 3, 2);
    std::vector<uint8_t> mask(6, 1);
    StereoMetrics m = stereo_metrics(gt, gt, mask);
    REQUIRE(m.bad_px.at(0.5) == 0.0);
    REQUIRE(m.bad_px.at(1.0) == 0.0);
    REQUIRE(m.bad_px.at(2.0) == 0.0);
    REQUIRE(m.rmse == 0.0);
  }
  SECTION("constant 0.75 px offset") {
    DisparityMap gt = map_from({1, 2, 3, 4}, 4, 1);
    DisparityMap est(4, 1);
    for (size_t i = 0; i < est.size(); ++i)
      est.values[i] = gt.values[i] + 0.75f;
    std::vector<uint8_t> mask(4, 1);
    StereoMetrics m = stereo_metrics(est, gt, mask);
    REQUIRE(m.bad_px.at(0.5) == 100.0);
    REQUIRE(m.bad_px.at(1.0) == 0.0);
    REQUIRE(m.rmse == Catch::Approx(0.75));
  }
  SECTION("half the pixels off by 3 px") {
    DisparityMap gt = map_from({0, 0, 0, 0}, 4, 1);
    DisparityMap est = map_from({0, 3, 0, 3}, 4, 1);
    std::vector<uint8_t> mask(4, 1);
    StereoMetrics m = stereo_metrics(est, gt, mask);
    REQUIRE(m.bad_px.at(2.0) == 50.0);
  }
  SECTION("empty mask rejected") {
    DisparityMap gt = map_from({0, 0}, 2, 1);
    std::vector<uint8_t> mask(2, 0);
    REQUIRE_THROWS_AS(stereo_metrics(gt, gt, mask), InputError);
  }
}

TEST_CASE("metric report", "[metrics]") {
  Rng rng(104);
  DisparityMap gt(9, 9), est(9, 9);
  for (size_t i = 0; i < gt.size(); ++i) {
    gt.values[i] = float(rng.uniform(0.0, 4.0));
    est.values[i] = float(gt.values[i] + rng.uniform(-0.2, 0.2));
  }
  MetricReport r = evaluate_dp(est, gt, nullptr);
  REQUIRE(r.geometric_mean ==
          Catch::Approx(std::cbrt(r.ai1 * r.ai2 * r.one_minus_abs_spearman))
              .margin(1e-12));
  SECTION("confidence below threshold excludes pixels") {
    Image conf(9, 9, 1.0f);
    MetricReport with_conf = evaluate_dp(est, gt, &conf);
    REQUIRE(with_conf.ai1 == Catch::Approx(r.ai1));
    // zeroing confidence over pixels changes the evaluated set
    for (int i = 0; i < 40; ++i) conf.data[i] = 0.0f;
    MetricReport masked = evaluate_dp(est, gt, &conf);
    REQUIRE(masked.ai1 != Catch::Approx(r.ai1).margin(1e-12));
  }
}
