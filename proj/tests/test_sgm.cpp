#include "cca/sgm.hpp"

#include "test_util.hpp"

using namespace cca;

TEST_CASE("sgm aggregation", "[sgm]") {
  SECTION("zero penalties sum the raw volume R times") {
    Rng rng(111);
    CostVolume cv(6, 5, 0, 3);
    for (float& c : cv.costs) c = float(rng.uniform());
    Image guide = testutil::random_image(6, 5, 112);
    SgmParams params;
    params.p1 = 1e-12;  // recurrence needs p1 > 0; negligible coupling
    params.p2 = 1e-12;
    params.num_paths = 8;
    CostVolume agg = sgm_aggregate(cv, params, guide);
    for (size_t i = 0; i < cv.costs.size(); ++i)
      REQUIRE(agg.costs[i] == Catch::Approx(8.0 * cv.costs[i]).margin(1e-4));
  }

  SECTION("1x3 volume matches a hand-unrolled recurrence") {
    CostVolume cv(3, 1, 0, 1);
    // costs[x][d]
    float c[3][2] = {{1.0f, 3.0f}, {4.0f, 0.5f}, {2.0f, 2.5f}};
    for (int x = 0; x < 3; ++x)
      for (int d = 0; d < 2; ++d) cv.at(x, 0, d) = c[x][d];
    Image guide(3, 1, 0.5f);  // flat: no p2 attenuation
    SgmParams params;
    params.p1 = 1.0;
    params.p2 = 2.0;
    params.num_paths = 4;  // on a row, vertical paths contribute raw costs

    // forward pass
    double f0[2] = {c[0][0], c[0][1]};
    auto relax = [&](const double* prev, const float* cost, double* out) {
      double prev_min = std::min(prev[0], prev[1]);
      out[0] = cost[0] + std::min({prev[0], prev[1] + params.p1,
                                   prev_min + params.p2}) - prev_min;
      out[1] = cost[1] + std::min({prev[1], prev[0] + params.p1,
                                   prev_min + params.p2}) - prev_min;
    };
    double f1[2], f2[2];
    relax(f0, c[1], f1);
    relax(f1, c[2], f2);
    // backward pass
    double b2[2] = {c[2][0], c[2][1]};
    double b1[2], b0[2];
    relax(b2, c[1], b1);
    relax(b1, c[0], b0);
    // vertical paths are length 1: raw costs, both directions
    double want[3][2];
    for (int d = 0; d < 2; ++d) {
      want[0][d] = f0[d] + b0[d] + 2.0 * c[0][d];
      want[1][d] = f1[d] + b1[d] + 2.0 * c[1][d];
      want[2][d] = f2[d] + b2[d] + 2.0 * c[2][d];
    }
    CostVolume agg = sgm_aggregate(cv, params, guide);
    for (int x = 0; x < 3; ++x)
      for (int d = 0; d < 2; ++d)
        REQUIRE(agg.at(x, 0, d) == Catch::Approx(want[x][d]).margin(1e-5));
  }

  SECTION("constant volume resolves ties to the lowest disparity") {
    CostVolume cv(5, 4, -1, 2);
    for (float& c : cv.costs) c = 1.0f;
    Image guide(5, 4, 0.3f);
    SgmParams params;
    DisparityMap d = wta_subpixel(sgm_aggregate(cv, params, guide));
    for (float v : d.values) REQUIRE(v == -1.0f);
  }

  SECTION("aggregated costs stay finite and bounded") {
    Rng rng(113);
    CostVolume cv(12, 10, 0, 7);
    float max_c = 0.0f;
    for (float& c : cv.costs) {
      c = float(rng.uniform(0.0, 2.0));
      max_c = std::max(max_c, c);
    }
    Image guide = testutil::random_image(12, 10, 114);
    SgmParams params;
    params.p1 = 0.1;
    params.p2 = 0.9;
    CostVolume agg = sgm_aggregate(cv, params, guide);
    double bound = 8.0 * (max_c + params.p2 * cv.num_planes());
    for (float c : agg.costs) {
      REQUIRE(std::isfinite(c));
      REQUIRE(c <= bound);
    }
  }

  SECTION("single-plane volume rejected") {
    CostVolume cv(4, 4, 2, 2);
    Image guide(4, 4, 0.0f);
    REQUIRE_THROWS_AS(sgm_aggregate(cv, SgmParams{}, guide), InputError);
  }
}

TEST_CASE("winner-take-all refinement", "[sgm]") {
  SECTION("symmetric triplet keeps the integer disparity") {
    CostVolume cv(1, 1, 4, 6);
    cv.at(0, 0, 4) = 1.0f;
    cv.at(0, 0, 5) = 0.0f;
    cv.at(0, 0, 6) = 1.0f;
    DisparityMap d = wta_subpixel(cv);
    REQUIRE(d(0, 0) == 5.0f);
  }
  SECTION("asymmetric triplet interpolates") {
    CostVolume cv(1, 1, 4, 6);
    cv.at(0, 0, 4) = 4.0f;
    cv.at(0, 0, 5) = 1.0f;
    cv.at(0, 0, 6) = 2.0f;
    DisparityMap d = wta_subpixel(cv);
    REQUIRE(double(d(0, 0)) == Catch::Approx(5.25));
  }
  SECTION("boundary argmin stays integer") {
    CostVolume cv(1, 1, 0, 2);
    cv.at(0, 0, 0) = 0.1f;
    cv.at(0, 0, 1) = 1.0f;
    cv.at(0, 0, 2) = 2.0f;
    DisparityMap d = wta_subpixel(cv);
    REQUIRE(d(0, 0) == 0.0f);
  }
  SECTION("argmin is invariant to uniform scaling of the volume") {
    Rng rng(115);
    CostVolume cv(7, 6, -2, 3);
    for (float& c : cv.costs) c = float(rng.uniform(0.0, 1.0));
    Image guide(7, 6, 0.5f);
    SgmParams params;
    params.p1 = 1e-12;
    params.p2 = 1e-12;
    DisparityMap direct = wta_subpixel(cv);
    DisparityMap through = wta_subpixel(sgm_aggregate(cv, params, guide));
    for (size_t i = 0; i < direct.size(); ++i)
      REQUIRE(double(through.values[i]) ==
              Catch::Approx(double(direct.values[i])).margin(1e-4));
  }
}
