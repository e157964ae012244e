#include "cca/cost.hpp"

#include "test_util.hpp"

using namespace cca;
using testutil::random_image;

namespace {

Image integer_shifted(const Image& img, int s) {
  // right(x) = left(x + s), replicated at the borders
  Image out(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) out(x, y) = img.at_clamped(x + s, y);
  return out;
}

}  // namespace

TEST_CASE("cost volume basics", "[cost]") {
  SECTION("identical images have zero SAD at d = 0") {
    Image img = random_image(20, 16, 21);
    CostVolume cv = compute_cost(img, img, CostMetric::kSad, 1.5, -2, 2);
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 20; ++x)
        REQUIRE(cv.at(x, y, 0) == Catch::Approx(0.0).margin(1e-6));
  }
  SECTION("integer shift puts the SAD minimum at the shift") {
    Image left = random_image(48, 24, 22);
    Image right = integer_shifted(left, 1);
    CostVolume cv = compute_cost(left, right, CostMetric::kSad, 1.5, -3, 3);
    int radius = int(std::ceil(3.0 * 1.5));
    int margin = radius + 1;
    for (int y = margin; y < 24 - margin; ++y) {
      for (int x = margin; x < 48 - margin; ++x) {
        int best = -3;
        for (int d = -3; d <= 3; ++d)
          if (cv.at(x, y, d) < cv.at(x, y, best)) best = d;
        REQUIRE(best == 1);
      }
    }
  }
  SECTION("constant images hit the NCC zero-variance guard") {
    Image a(16, 12, 0.4f), b(16, 12, 0.4f);
    CostVolume cv = compute_cost(a, b, CostMetric::kNcc, 2.0, -2, 2);
    // guarded NCC is 0, so cost = 1 - 0 = 1 on every plane
    for (int d = -2; d <= 2; ++d)
      for (int y = 0; y < 12; ++y)
        for (int x = 0; x < 16; ++x)
          REQUIRE(cv.at(x, y, d) == Catch::Approx(1.0).margin(1e-5));
  }
  SECTION("dimension and range validation") {
    Image a(10, 10, 0.0f), b(11, 10, 0.0f);
    REQUIRE_THROWS_AS(compute_cost(a, b, CostMetric::kSad, 1.0, -1, 1),
                      InputError);
    REQUIRE_THROWS_AS(compute_cost(a, a, CostMetric::kSad, 1.0, 0, 1),
                      InputError);
  }
}

TEST_CASE("cost volume properties", "[cost]") {
  SECTION("costs are non-negative for every metric") {
    Image left = random_image(24, 18, 23);
    Image right = random_image(24, 18, 24);
    for (CostMetric m : {CostMetric::kSad, CostMetric::kSsd, CostMetric::kNcc}) {
      CostVolume cv = compute_cost(left, right, m, 1.2, -2, 2);
      for (float c : cv.costs) REQUIRE(c >= 0.0f);
    }
  }
  SECTION("translating both images leaves interior costs unchanged") {
    Image left = random_image(40, 30, 25);
    Image right = random_image(40, 30, 26);
    auto translate = [](const Image& img, int tx, int ty) {
      Image out(img.width, img.height);
      for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
          out(x, y) = img.at_clamped(x - tx, y - ty);
      return out;
    };
    CostVolume cv0 = compute_cost(left, right, CostMetric::kSad, 1.0, -1, 1);
    CostVolume cv1 = compute_cost(translate(left, 2, 1), translate(right, 2, 1),
                                  CostMetric::kSad, 1.0, -1, 1);
    int margin = int(std::ceil(3.0 * 1.0)) + 3;
    for (int d = -1; d <= 1; ++d)
      for (int y = margin; y < 30 - margin; ++y)
        for (int x = margin; x < 40 - margin; ++x)
          REQUIRE(cv1.at(x, y, d) ==
                  Catch::Approx(cv0.at(x - 2, y - 1, d)).margin(1e-6));
  }
  SECTION("argmin recovers every integer shift in range") {
    Image left = random_image(64, 20, 27);
    for (int s : {-2, 0, 2}) {
      Image right = integer_shifted(left, s);
      CostVolume cv = compute_cost(left, right, CostMetric::kSsd, 1.0, -3, 3);
      int margin = int(std::ceil(3.0 * 1.0)) + std::abs(s) + 1;
      for (int y = margin; y < 20 - margin; ++y) {
        for (int x = margin; x < 64 - margin; ++x) {
          int best = -3;
          for (int d = -3; d <= 3; ++d)
            if (cv.at(x, y, d) < cv.at(x, y, best)) best = d;
          REQUIRE(best == s);
        }
      }
    }
  }
}

TEST_CASE("find_minima", "[cost]") {
  auto volume_from_curve = [](const std::vector<float>& curve) {
    CostVolume cv(1, 1, 0, int(curve.size()) - 1);
    for (size_t i = 0; i < curve.size(); ++i) cv.costs[i] = curve[i];
    return cv;
  };

  SECTION("strictly convex curve yields a single entry") {
    CostVolume cv = volume_from_curve({9, 4, 1, 0, 1, 4, 9});
    MinimaList m = find_minima(cv, 3);
    REQUIRE(m.count_at(0, 0) == 1);
    REQUIRE(m.at(0, 0)[0].d == 3);
    REQUIRE(m.at(0, 0)[0].cost == 0.0f);
  }
  SECTION("global minimum then next local minimum, ascending by cost") {
    CostVolume cv = volume_from_curve({3, 1, 2, 0, 2});
    MinimaList m = find_minima(cv, 2);
    REQUIRE(m.count_at(0, 0) == 2);
    REQUIRE(m.at(0, 0)[0].d == 3);
    REQUIRE(m.at(0, 0)[0].cost == 0.0f);
    REQUIRE(m.at(0, 0)[1].d == 1);
    REQUIRE(m.at(0, 0)[1].cost == 1.0f);
  }
  SECTION("flat curve ties break to the lowest disparity") {
    CostVolume cv = volume_from_curve({2, 2, 2, 2});
    MinimaList m = find_minima(cv, 3);
    REQUIRE(m.count_at(0, 0) == 1);
    REQUIRE(m.at(0, 0)[0].d == 0);
  }
  SECTION("first entry matches a brute-force argmin on random volumes") {
    cca::Rng rng(31);
    CostVolume cv(7, 5, -4, 4);
    for (float& c : cv.costs) c = float(rng.uniform());
    MinimaList m = find_minima(cv, 5);
    for (int y = 0; y < 5; ++y) {
      for (int x = 0; x < 7; ++x) {
        int best = -4;
        for (int d = -4; d <= 4; ++d)
          if (cv.at(x, y, d) < cv.at(x, y, best)) best = d;
        REQUIRE(m.at(x, y)[0].d == best);
        REQUIRE(m.at(x, y)[0].cost == cv.at(x, y, best));
        // remaining entries sorted ascending by cost
        for (int k = 1; k < m.count_at(x, y); ++k)
          REQUIRE(m.at(x, y)[k].cost >= m.at(x, y)[k - 1].cost);
      }
    }
  }
}
