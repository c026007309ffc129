#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "doctest.h"
#include "genre/metrics.hpp"
#include "test_util.hpp"

using genre::Image;
using genre::SsimParams;

namespace {

// Deterministic integer-formula pair; reproducible in any environment, which
// is how the frozen third-party reference values below were produced.
Image formula_ref(int n) {
    Image img(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) img.at(r, c) = static_cast<double>((7 * r + 13 * c) % 256);
    return img;
}

Image formula_test(const Image& ref) {
    Image img(ref.width, ref.height);
    for (int r = 0; r < ref.height; ++r)
        for (int c = 0; c < ref.width; ++c) {
            double v = ref.at(r, c) + static_cast<double>((31 * r + 17 * c) % 64) - 32.0;
            img.at(r, c) = std::clamp(v, 0.0, 255.0);
        }
    return img;
}

}  // namespace

TEST_CASE("psnr hand values and peak conventions") {
    Image ref(2, 2), test(2, 2);
    ref.samples = {100, 150, 200, 250};
    test.samples = {105, 155, 205, 255};  // MSE = 25
    CHECK(genre::psnr_db(ref, test) == doctest::Approx(33.97940009).epsilon(1e-9));
    CHECK(genre::psnr_db(ref, test, genre::PsnrPeak::TestMax) ==
          doctest::Approx(34.15140352).epsilon(1e-9));

    CHECK(std::isinf(genre::psnr_db(ref, ref)));
    CHECK(genre::psnr_db(ref, ref) > 0);

    Image other(2, 3, 0.0);
    CHECK_THROWS_AS(genre::psnr_db(ref, other), std::invalid_argument);
}

TEST_CASE("ssim of identical images is one") {
    Image img = testutil::structured_image(32, 32);
    CHECK(genre::ssim(img, img) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(genre::ssim(img, img, SsimParams::global()) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("global ssim hand value") {
    Image ref(2, 2), zero(2, 2, 0.0);
    ref.samples = {0, 0, 255, 255};
    double v = genre::ssim(ref, zero, SsimParams::global());
    CHECK(v == doctest::Approx(1.4342608910999172e-06).epsilon(1e-9));
}

TEST_CASE("ssim matches an independent reference implementation") {
    Image ref = formula_ref(64);
    Image test = formula_test(ref);
    // Frozen values from scikit-image structural_similarity (win 11, Gaussian
    // sigma 1.5, population covariance, data_range 255) on the same formulas.
    CHECK(genre::ssim(ref, test, SsimParams::windowed_default()) ==
          doctest::Approx(0.8420093509467576).epsilon(1e-9));
    CHECK(genre::ssim(ref, test, SsimParams::global()) ==
          doctest::Approx(0.9709576862911729).epsilon(1e-9));
}

TEST_CASE("a uniform full-size window reduces to the global statistic") {
    Image ref = testutil::random_image(16, 16, 2);
    Image test = testutil::random_image(16, 16, 3);
    SsimParams p;
    p.windowed = true;
    p.window_size = 16;
    p.gaussian_window = false;
    CHECK(genre::ssim(ref, test, p) ==
          doctest::Approx(genre::ssim(ref, test, SsimParams::global())).epsilon(1e-12));
}

TEST_CASE("anti-correlated images score negative") {
    Image ref(16, 16), neg(16, 16);
    for (int r = 0; r < 16; ++r)
        for (int c = 0; c < 16; ++c) {
            ref.at(r, c) = static_cast<double>(16 * r + c);
            neg.at(r, c) = 255.0 - ref.at(r, c);
        }
    CHECK(genre::ssim(ref, neg, SsimParams::global()) < 0.0);
}

TEST_CASE("ssim window validation") {
    Image a = testutil::random_image(16, 16, 4);
    SsimParams p;
    p.window_size = 17;
    CHECK_THROWS_AS(genre::ssim(a, a, p), std::invalid_argument);
    p.window_size = 0;
    CHECK_THROWS_AS(genre::ssim(a, a, p), std::invalid_argument);
    SsimParams bad;
    bad.dynamic_range = 0.0;
    CHECK_THROWS_AS(genre::ssim(a, a, bad), std::invalid_argument);
}
