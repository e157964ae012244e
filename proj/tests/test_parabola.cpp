#include "cca/parabola.hpp"

#include "test_util.hpp"

using namespace cca;

namespace {

// dense scan minimizer of q(t) = a t^2 + b t + c over [lo, hi]
double grid_argmin(double a, double b, double c, double lo, double hi,
                   double step = 1e-4) {
  double best_t = lo, best_v = a * lo * lo + b * lo + c;
  for (double t = lo; t <= hi; t += step) {
    double v = a * t * t + b * t + c;
    if (v < best_v) {
      best_v = v;
      best_t = t;
    }
  }
  return best_t;
}

}  // namespace

TEST_CASE("local parabola fitting", "[parabola]") {
  SECTION("symmetric triplet") {
    LocalParabola p = fit_local(1, 0, 1, 3);
    REQUIRE(p.a == 1.0);
    REQUIRE(p.b == 0.0);
    REQUIRE(p.c == 0.0);
    REQUIRE(-p.b / (2 * p.a) == 0.0);
  }
  SECTION("asymmetric triplet matches the exact interpolating quadratic") {
    LocalParabola p = fit_local(4, 1, 2, 5);
    // the fit must pass through the three samples
    REQUIRE(p.a * 1 - p.b + p.c == Catch::Approx(4.0));
    REQUIRE(p.c == Catch::Approx(1.0));
    REQUIRE(p.a + p.b + p.c == Catch::Approx(2.0));
    REQUIRE(p.a == Catch::Approx(2.0));
    REQUIRE(p.b == Catch::Approx(-1.0));
    double offset = grid_argmin(p.a, p.b, p.c, -0.5, 0.5);
    REQUIRE(offset == Catch::Approx(0.25).margin(1e-3));
    REQUIRE(-p.b / (2 * p.a) == Catch::Approx(0.25));
  }
  SECTION("flat triplet degenerates to zero curvature") {
    LocalParabola p = fit_local(2, 2, 2, 0);
    REQUIRE(p.a == 0.0);
    REQUIRE(p.b == 0.0);
  }
}

TEST_CASE("local to global coefficients", "[parabola]") {
  SECTION("anchored fit keeps its minimizer") {
    LocalParabola p{2.0, -1.0, 1.0, 5};
    GlobalParabola g = to_global(p);
    REQUIRE(g.alpha == Catch::Approx(2.0));
    REQUIRE(g.beta == Catch::Approx(-21.0));
    REQUIRE(g.gamma == Catch::Approx(56.0));
    double local_min = p.d0 - p.b / (2 * p.a);
    REQUIRE(-g.beta / (2 * g.alpha) == Catch::Approx(local_min));
    REQUIRE(grid_argmin(g.alpha, g.beta, g.gamma, 4.0, 6.5) ==
            Catch::Approx(5.25).margin(1e-3));
  }
  SECTION("zero anchor is the identity") {
    LocalParabola p{1.5, 0.3, -0.2, 0};
    GlobalParabola g = to_global(p);
    REQUIRE(g.alpha == p.a);
    REQUIRE(g.beta == p.b);
    REQUIRE(g.gamma == p.c);
  }
  SECTION("negative anchor") {
    LocalParabola p{1.0, 0.0, 0.0, -3};
    GlobalParabola g = to_global(p);
    REQUIRE(g.alpha == Catch::Approx(1.0));
    REQUIRE(g.beta == Catch::Approx(6.0));
    REQUIRE(g.gamma == Catch::Approx(9.0));
    REQUIRE(-g.beta / (2 * g.alpha) == Catch::Approx(-3.0));
  }
  SECTION("composition preserves minimizers on random fits") {
    Rng rng(41);
    for (int trial = 0; trial < 200; ++trial) {
      double c0 = rng.uniform(0.0, 0.5);
      double cm = c0 + rng.uniform(1e-5, 2.0);
      double cp = c0 + rng.uniform(1e-5, 2.0);
      int d0 = rng.uniform_int(-10, 10);
      LocalParabola p = fit_local(cm, c0, cp, d0);
      if (p.a <= 1e-6) continue;
      GlobalParabola g = to_global(p);
      double want = d0 - p.b / (2 * p.a);
      REQUIRE(-g.beta / (2 * g.alpha) == Catch::Approx(want).margin(1e-9));
    }
  }
}

TEST_CASE("confidence scaling", "[parabola]") {
  const double eps = 1e-4;
  SECTION("distinct second minimum keeps full confidence at the threshold") {
    REQUIRE(confidence_scale(1.0, 2.2, 2.2, eps) == Catch::Approx(1.0));
    REQUIRE(confidence_scale(1.0, 5.0, 2.2, eps) == Catch::Approx(1.0));
  }
  SECTION("perfect ambiguity collapses to eps squared") {
    REQUIRE(confidence_scale(1.0, 1.0, 2.2, eps) ==
            Catch::Approx(eps * eps));
    REQUIRE(confidence_scale(0.0, 0.0, 2.2, eps) ==
            Catch::Approx(eps * eps));
  }
  SECTION("scale stays in [eps^2, 1] and preserves the minimizer") {
    Rng rng(42);
    for (int trial = 0; trial < 300; ++trial) {
      double best = rng.uniform(0.0, 2.0);
      double second = best + rng.uniform(0.0, 3.0);
      double s = confidence_scale(best, second, 2.2, eps);
      REQUIRE(s >= eps * eps);
      REQUIRE(s <= 1.0);
      double alpha = rng.uniform(0.1, 3.0), beta = rng.uniform(-2.0, 2.0);
      REQUIRE(-(s * beta) / (2 * s * alpha) ==
              Catch::Approx(-beta / (2 * alpha)).margin(1e-12));
    }
  }
}

TEST_CASE("invalidation sentinel", "[parabola]") {
  const double eps = 1e-4;
  ParabolaMap pm(3, 1);
  pm.alpha = {0.04, 0.0, 0.5};
  pm.beta = {1.0, 2.0, 3.0};

  SECTION("strict threshold keeps alpha == t_a") {
    ParabolaMap out = invalidate(pm, 0.04, eps);
    REQUIRE(out.alpha[0] == 0.04);
    REQUIRE(out.beta[0] == 1.0);
    REQUIRE(out.valid[0] == 1);
    // flat fit becomes the exact sentinel
    REQUIRE(out.alpha[1] == eps);
    REQUIRE(out.beta[1] == 0.0);
    REQUIRE(out.valid[1] == 0);
  }
  SECTION("zero threshold changes nothing on a valid map") {
    ParabolaMap valid_map(4, 2);
    for (size_t i = 0; i < valid_map.size(); ++i) {
      valid_map.alpha[i] = 0.1 + double(i);
      valid_map.beta[i] = -double(i);
    }
    ParabolaMap out = invalidate(valid_map, 0.0, eps);
    for (size_t i = 0; i < out.size(); ++i) {
      REQUIRE(out.alpha[i] == valid_map.alpha[i]);
      REQUIRE(out.beta[i] == valid_map.beta[i]);
      REQUIRE(out.valid[i] == 1);
    }
  }
  SECTION("sentinel is bit-stable") {
    ParabolaMap out = invalidate(pm, 0.1, eps);
    REQUIRE(out.alpha[0] == eps);
    REQUIRE(out.alpha[1] == eps);
    REQUIRE(out.beta[0] == 0.0);
    REQUIRE(out.beta[1] == 0.0);
  }
}

TEST_CASE("recentering", "[parabola]") {
  SECTION("own minimizer is a fixed point") {
    LocalParabola p{2.0, -1.0, 1.0, 5};
    double own = -p.b / (2 * p.a);
    LocalParabola q = recenter(p, own);
    REQUIRE(q.b == Catch::Approx(p.b));
    REQUIRE(q.a == p.a);
  }
  SECTION("target offset is realized") {
    LocalParabola p{2.0, 0.7, 0.3, 0};
    LocalParabola q = recenter(p, 0.25);
    REQUIRE(q.b == Catch::Approx(-1.0));
    REQUIRE(-q.b / (2 * q.a) == Catch::Approx(0.25));
  }
  SECTION("zero offset zeroes the linear term") {
    LocalParabola q = recenter({1.3, 0.9, 0.1, 2}, 0.0);
    REQUIRE(q.b == 0.0);
  }
}

TEST_CASE("histogram-equalization sub-pixel offset", "[parabola]") {
  SECTION("symmetric triplet gives zero") {
    REQUIRE(histeq_subpixel(1, 0, 1, 0.0) == 0.0);
    REQUIRE(histeq_subpixel(2, 2, 2, 0.0) == 0.0);  // flat
  }
  SECTION("offset points at the lower neighbor") {
    double off = histeq_subpixel(4, 1, 2, 0.0);
    REQUIRE(off > 0.0);
    REQUIRE(off < 0.5);
    double mirrored = histeq_subpixel(2, 1, 4, 0.0);
    REQUIRE(mirrored == Catch::Approx(-off));
  }
  SECTION("clamped to (-0.5, 0.5) under any calibration") {
    Rng rng(43);
    for (int trial = 0; trial < 300; ++trial) {
      double c0 = rng.uniform(0.0, 1.0);
      double cm = c0 + rng.uniform(0.0, 2.0);
      double cp = c0 + rng.uniform(0.0, 2.0);
      double cal = rng.uniform(-0.45, 0.45);
      double off = histeq_subpixel(cm, c0, cp, cal);
      REQUIRE(std::abs(off) < 0.5);
    }
  }
}

TEST_CASE("sub-pixel offset calibration", "[parabola]") {
  SECTION("deterministic for a fixed seed") {
    double a = calibrate_histeq_offset(99);
    double b = calibrate_histeq_offset(99);
    REQUIRE(a == b);
  }
  SECTION("injected bias shifts the measurement one-for-one") {
    double base = calibrate_histeq_offset(7, 0.0);
    double biased = calibrate_histeq_offset(7, 0.1);
    REQUIRE(biased - base == Catch::Approx(0.1).margin(1e-9));
    REQUIRE(biased == Catch::Approx(0.1).margin(0.02));
  }
  SECTION("the estimator itself is close to unbiased") {
    REQUIRE(std::abs(calibrate_histeq_offset(7, 0.0)) < 0.02);
  }
}
