#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "genre/image.hpp"

namespace genre {

// Equivalent realizations of the undecimated Haar filter bank. All six produce
// identical subbands (up to floating-point rounding); they differ in the
// datapath being modeled.
enum class Realization {
    Uwt1d,           // per-level separable 2-tap cascades
    Uwt2d,           // per-level 2-D quadrant combining on the LL cascade
    ConvCombined1d,  // separable direct convolution with the combined filters
    ConvCombined2d,  // direct 2-D convolution with the combined kernels
    Ruwt1d,          // separable running-sum recursions of the combined filters
    Ruwt2d,          // 2-D running box sums + quadrant combining
};

const char* realization_name(Realization r);
Realization realization_from_name(const std::string& name);

enum class BandKind { LH, HL, HH, LL };

struct BandId {
    int level = 1;  // 1-based; L = 2^level
    BandKind kind = BandKind::LL;
};

// Band ordering is level-major: LH1, HL1, HH1, LH2, ..., HH_J, LL_J.
// LH is low along rows / high along columns (kernel h x g), HL the transpose.
int band_count(int levels);
BandId band_id(int index, int levels);
int band_index(const BandId& id, int levels);
std::string band_name(int index, int levels);

struct SubbandSet {
    int levels = 0;
    std::vector<Image> bands;  // band_count(levels) images, full input size each
};

// Instrumented addition counting for the hardware cost model. `additions`
// covers steady-state filter-datapath adds; recursion warm-up (direct sums
// for the first row/column) is tracked separately.
struct OpCount {
    std::uint64_t additions = 0;
    std::uint64_t init_additions = 0;
    std::uint64_t output_pixels = 0;
    double per_output_pixel() const;
};

// J-level undecimated Haar analysis with circular boundary extension.
// Requires width and height divisible by 2^levels.
SubbandSet decompose(const Image& img, int levels, Realization r, OpCount* ops = nullptr);

// Running-sum analysis (the recursive realizations), selected by domain.
SubbandSet decompose_recursive(const Image& img, int levels, bool two_d, OpCount* ops = nullptr);

// Per-band synthesis: psi_i is band i passed through the flipped (adjoint)
// kernel cascade. sum_i psi_i reconstructs the analyzed image exactly.
std::vector<Image> recompose(const SubbandSet& bands, Realization r, OpCount* ops = nullptr);

// x_hat = sum_i alpha[i] * psi[i]
Image shrink_and_combine(const std::vector<Image>& psis, const std::vector<double>& alpha);

// Combined level-j 1-D filters, length L = 2^j: refinement taps are all +1/L,
// wavelet taps are -1/L for the first L/2 and +1/L for the rest.
std::vector<double> combined_refinement_filter(int level);
std::vector<double> combined_wavelet_filter(int level);

// Combined 2-D kernel for a band as an LxL grid, entries +/- 1/L^2.
Image combined_kernel(const BandId& id);

// Sum of squared taps of the band's combined kernel: 4^-j for level-j details
// and 4^-J for LL. Equals Trace(H_i)/N.
double kernel_energy(const BandId& id);

// One analysis level with the level's individual (upsampled 2-tap) filters;
// input is the previous level's LL.
struct LevelBands {
    Image lh, hl, hh, ll;
};
LevelBands analyze_level(const Image& input, int level, bool two_d, OpCount* ops = nullptr);

// One analysis level of the combined realizations (direct convolution or
// running sums), applied to the original image.
LevelBands analyze_level_combined(const Image& img, int level, Realization r,
                                  OpCount* ops = nullptr);

// Synthesis of a single band's equivalent image psi through the chosen
// datapath. recompose() is a loop over this.
Image synthesize_band(const Image& band, const BandId& id, Realization r,
                      OpCount* ops = nullptr);

// Classic joint synthesis of one level (4 bands -> previous LL). The counter
// records filter-internal additions only; the cross-band combining adders are
// excluded, matching the cost model's accounting.
Image synthesize_level_joint(const LevelBands& bands, int level, bool two_d, OpCount* ops = nullptr);

}  // namespace genre
