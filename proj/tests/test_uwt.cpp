#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "genre/uwt.hpp"
#include "test_util.hpp"

using genre::BandId;
using genre::BandKind;
using genre::Image;
using genre::Realization;
using genre::SubbandSet;

namespace {

const Realization kAll[] = {Realization::Uwt1d,   Realization::Uwt2d,
                            Realization::ConvCombined1d, Realization::ConvCombined2d,
                            Realization::Ruwt1d,  Realization::Ruwt2d};

Image reconstruct(const SubbandSet& bands, Realization r) {
    std::vector<Image> psis = genre::recompose(bands, r);
    std::vector<double> ones(psis.size(), 1.0);
    return genre::shrink_and_combine(psis, ones);
}

}  // namespace

TEST_CASE("band bookkeeping") {
    CHECK(genre::band_count(1) == 4);
    CHECK(genre::band_count(5) == 16);
    CHECK(genre::band_name(0, 3) == "LH1");
    CHECK(genre::band_name(2, 3) == "HH1");
    CHECK(genre::band_name(4, 3) == "HL2");
    CHECK(genre::band_name(9, 3) == "LL3");
    for (int i = 0; i < genre::band_count(3); ++i)
        CHECK(genre::band_index(genre::band_id(i, 3), 3) == i);
    BandId last = genre::band_id(9, 3);
    CHECK(last.kind == BandKind::LL);
    CHECK(last.level == 3);
    CHECK_THROWS_AS(genre::band_id(10, 3), std::invalid_argument);
    CHECK_THROWS_AS(genre::band_count(0), std::invalid_argument);
}

TEST_CASE("combined filters and kernels") {
    auto h3 = genre::combined_refinement_filter(3);
    REQUIRE(h3.size() == 8);
    for (double t : h3) CHECK(t == 0.125);

    auto g2 = genre::combined_wavelet_filter(2);
    REQUIRE(g2.size() == 4);
    CHECK(g2[0] == -0.25);
    CHECK(g2[1] == -0.25);
    CHECK(g2[2] == 0.25);
    CHECK(g2[3] == 0.25);

    // Level-1 kernels, laid out as kernel.at(row offset, column offset).
    Image lh = genre::combined_kernel({1, BandKind::LH});
    CHECK(lh.at(0, 0) == -0.25);
    CHECK(lh.at(0, 1) == 0.25);
    CHECK(lh.at(1, 0) == -0.25);
    CHECK(lh.at(1, 1) == 0.25);
    Image hl = genre::combined_kernel({1, BandKind::HL});
    CHECK(hl.at(0, 0) == -0.25);
    CHECK(hl.at(0, 1) == -0.25);
    CHECK(hl.at(1, 0) == 0.25);
    CHECK(hl.at(1, 1) == 0.25);
    Image hh = genre::combined_kernel({1, BandKind::HH});
    CHECK(hh.at(0, 0) == 0.25);
    CHECK(hh.at(0, 1) == -0.25);
    CHECK(hh.at(1, 0) == -0.25);
    CHECK(hh.at(1, 1) == 0.25);
    Image ll = genre::combined_kernel({1, BandKind::LL});
    for (double t : ll.samples) CHECK(t == 0.25);
}

TEST_CASE("kernel energies are the dyadic trace factors") {
    CHECK(genre::kernel_energy({3, BandKind::LH}) == std::ldexp(1.0, -6));
    CHECK(genre::kernel_energy({5, BandKind::LL}) == std::ldexp(1.0, -10));
    for (int levels : {1, 2, 4}) {
        double sum = 0.0;
        for (int i = 0; i < genre::band_count(levels); ++i)
            sum += genre::kernel_energy(genre::band_id(i, levels));
        CHECK(sum == 1.0);  // exact: the kernels tile the energy dyadically
    }
}

TEST_CASE("impulse response reproduces the combined kernels") {
    Image impulse(8, 8, 0.0);
    impulse.at(0, 0) = 1.0;
    SubbandSet s = genre::decompose(impulse, 2, Realization::Uwt1d);
    for (int i = 0; i < genre::band_count(2); ++i) {
        BandId id = genre::band_id(i, 2);
        Image k = genre::combined_kernel(id);
        const Image& band = s.bands[static_cast<std::size_t>(i)];
        for (int r = 0; r < 8; ++r)
            for (int c = 0; c < 8; ++c) {
                double want = (r < k.height && c < k.width) ? k.at(r, c) : 0.0;
                CHECK(band.at(r, c) == doctest::Approx(want).epsilon(1e-12));
            }
    }
}

TEST_CASE("all realizations produce identical subbands and equivalent images") {
    Image img = testutil::random_image(16, 16, 11);
    SubbandSet ref = genre::decompose(img, 3, Realization::Uwt1d);
    std::vector<Image> ref_psi = genre::recompose(ref, Realization::Uwt1d);
    for (Realization r : kAll) {
        SubbandSet s = genre::decompose(img, 3, r);
        REQUIRE(s.bands.size() == ref.bands.size());
        for (std::size_t i = 0; i < s.bands.size(); ++i)
            CHECK(testutil::max_abs_diff(s.bands[i], ref.bands[i]) < 1e-9);
        std::vector<Image> psi = genre::recompose(s, r);
        for (std::size_t i = 0; i < psi.size(); ++i)
            CHECK(testutil::max_abs_diff(psi[i], ref_psi[i]) < 1e-9);
    }
    SubbandSet r1 = genre::decompose_recursive(img, 3, false);
    SubbandSet r2 = genre::decompose_recursive(img, 3, true);
    for (std::size_t i = 0; i < ref.bands.size(); ++i) {
        CHECK(testutil::max_abs_diff(r1.bands[i], ref.bands[i]) < 1e-9);
        CHECK(testutil::max_abs_diff(r2.bands[i], ref.bands[i]) < 1e-9);
    }
}

TEST_CASE("perfect reconstruction through every realization") {
    Image img = testutil::structured_image(16, 16);
    for (Realization r : kAll) {
        for (int levels : {1, 2, 4}) {
            SubbandSet s = genre::decompose(img, levels, r);
            CHECK(testutil::max_abs_diff(reconstruct(s, r), img) < 1e-9);
        }
    }
}

TEST_CASE("joint level synthesis inverts level analysis") {
    Image img = testutil::random_image(32, 32, 5);
    for (bool two_d : {false, true}) {
        genre::LevelBands lb = genre::analyze_level(img, 1, two_d);
        Image back = genre::synthesize_level_joint(lb, 1, two_d);
        CHECK(testutil::max_abs_diff(back, img) < 1e-12);

        // Level 3 filters applied directly to the image still invert.
        genre::LevelBands lb3 = genre::analyze_level(img, 3, two_d);
        Image back3 = genre::synthesize_level_joint(lb3, 3, two_d);
        CHECK(testutil::max_abs_diff(back3, img) < 1e-12);
    }
}

TEST_CASE("operation counts match the datapath structure exactly") {
    Image img = testutil::random_image(64, 64, 3);
    const std::uint64_t n = img.size();

    genre::OpCount ops;
    genre::analyze_level(img, 2, false, &ops);
    CHECK(ops.additions == 6 * n);  // 2 horizontal + 4 vertical 2-tap filters
    CHECK(ops.output_pixels == 4 * n);
    CHECK(ops.per_output_pixel() == doctest::Approx(1.5));

    ops = {};
    genre::analyze_level(img, 2, true, &ops);
    CHECK(ops.additions == 8 * n);  // shared quadrant combine
    CHECK(ops.per_output_pixel() == doctest::Approx(2.0));

    // Combined direct convolution: 1.5(L-1) and L^2-1 per output pixel.
    ops = {};
    genre::analyze_level_combined(img, 3, Realization::ConvCombined1d, &ops);
    CHECK(ops.additions == 6 * 7 * n);
    CHECK(ops.per_output_pixel() == doctest::Approx(1.5 * 7));
    ops = {};
    genre::analyze_level_combined(img, 3, Realization::ConvCombined2d, &ops);
    CHECK(ops.additions == 4 * 63 * n);
    CHECK(ops.per_output_pixel() == doctest::Approx(63.0));

    // Joint synthesis: 6 (1-D filters) and 12 (four 3-add combines).
    genre::LevelBands lb = genre::analyze_level(img, 1, false);
    ops = {};
    genre::synthesize_level_joint(lb, 1, false, &ops);
    CHECK(ops.additions == 6 * n);
    CHECK(ops.output_pixels == n);
    ops = {};
    genre::synthesize_level_joint(lb, 1, true, &ops);
    CHECK(ops.additions == 12 * n);

    // Recursions at level 5 on a wide image: steady state 3.75 per output.
    Image wide = testutil::random_image(256, 256, 9);
    ops = {};
    genre::analyze_level_combined(wide, 5, Realization::Ruwt1d, &ops);
    CHECK(ops.per_output_pixel() == doctest::Approx(3.75).epsilon(0.02));
    CHECK(ops.init_additions > 0);  // warm-up tracked separately
    ops = {};
    genre::analyze_level_combined(wide, 5, Realization::Ruwt2d, &ops);
    CHECK(ops.per_output_pixel() == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("argument validation") {
    Image img = testutil::random_image(12, 16, 1);
    CHECK_THROWS_AS(genre::decompose(img, 3, Realization::Uwt2d), std::invalid_argument);
    Image ok = testutil::random_image(16, 16, 1);
    CHECK_THROWS_AS(genre::decompose(ok, 0, Realization::Uwt2d), std::invalid_argument);
    CHECK_THROWS_AS(genre::decompose(ok, 5, Realization::Uwt2d), std::invalid_argument);

    SubbandSet s = genre::decompose(ok, 2, Realization::Uwt2d);
    s.bands.pop_back();
    CHECK_THROWS_AS(genre::recompose(s, Realization::Uwt2d), std::invalid_argument);

    std::vector<Image> psis = {ok, ok};
    CHECK_THROWS_AS(genre::shrink_and_combine(psis, {1.0}), std::invalid_argument);
    CHECK(genre::realization_from_name("ruwt2d") == Realization::Ruwt2d);
    CHECK_THROWS_AS(genre::realization_from_name("dwt"), std::invalid_argument);
}
