#pragma once

#include "genre/image.hpp"

namespace genre {

// Peak convention for PSNR: the default takes the peak from the clean
// reference (255 for 8-bit originals); TestMax uses the test image instead.
enum class PsnrPeak { ReferenceMax, TestMax };

// 10 log10(peak^2 / MSE). Identical images return +infinity as a distinct
// sentinel (callers report it specially).
double psnr_db(const Image& reference, const Image& test,
               PsnrPeak peak = PsnrPeak::ReferenceMax);

struct SsimParams {
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 255.0;  // L; c1 = (k1 L)^2, c2 = (k2 L)^2
    bool windowed = true;
    int window_size = 11;
    bool gaussian_window = true;  // uniform otherwise
    double window_sigma = 1.5;

    static SsimParams global();            // one global statistic, no windows
    static SsimParams windowed_default();  // 11x11 Gaussian, sigma 1.5
};

// Global mode evaluates the SSIM formula once with whole-image (population)
// statistics. Windowed mode computes the local SSIM map over all fully
// interior window positions and returns its mean; a uniform window the size
// of the image reduces exactly to the global value.
double ssim(const Image& reference, const Image& test, const SsimParams& params = {});

}  // namespace genre
